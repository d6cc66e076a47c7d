mod common;

use common::oracles;
use passfeas_core::geometry::*;
use proptest::prelude::*;

fn triangle_strategy() -> impl Strategy<Value = ViewTriangle> {
    (-20.0..20.0f64, -20.0..20.0f64, 0.0..360.0f64, 1.0..89.0f64, 0.1..10.0f64)
        .prop_map(|(x, y, o, h, l)| build_view_triangle(Point2::new(x, y), o, h, l).unwrap())
}

#[test]
fn monte_carlo_square_integral() {
    let sq = ConvexPolygon::rectangle(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
    let c = Point2::new(0.5, 0.5);
    let quad = integrate_pair_weights(&sq, c, c, 1.0);
    let mc = oracles::mc_square_pair_integral((0.5, 0.5), (0.0, 0.0), (1.0, 1.0), 400_000, &mut oracles::rng(11));
    assert!(((quad - mc) / mc).abs() < 1e-3, "quadrature {quad} vs monte carlo {mc}");
}

#[test]
fn integration_is_deterministic() {
    let t = build_view_triangle(Point2::new(0.3, -0.2), 17.0, 30.0, 2.0).unwrap().polygon();
    let a = integrate_pair_weights(&t, Point2::ORIGIN, Point2::new(1.0, 0.0), 2.0);
    let b = integrate_pair_weights(&t, Point2::ORIGIN, Point2::new(1.0, 0.0), 2.0);
    assert_eq!(a.to_bits(), b.to_bits());
}

proptest! {
    #[test]
    fn intersection_is_symmetric_and_bounded(a in triangle_strategy(), b in triangle_strategy()) {
        let (pa, pb) = (a.polygon(), b.polygon());
        let ab = intersect_convex(&pa, &pb).area();
        let ba = intersect_convex(&pb, &pa).area();
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + pa.area().max(pb.area())));
        prop_assert!(ab <= pa.area().min(pb.area()) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn self_intersection_is_identity(a in triangle_strategy()) {
        let p = a.polygon();
        prop_assert!((intersect_convex(&p, &p).area() - p.area()).abs() <= 1e-12 * (1.0 + p.area()));
    }

    #[test]
    fn triangle_area_formula(t in triangle_strategy()) {
        let h = t.half_angle.to_radians();
        let expected = t.side_length * t.side_length * h.sin() * h.cos();
        prop_assert!((t.polygon().area() - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn triangle_equivariance(t in triangle_strategy(), theta in 0.0..360.0f64, dx in -50.0..50.0f64, dy in -50.0..50.0f64) {
        let (s, c) = theta.to_radians().sin_cos();
        let moved_apex = Point2::new(c * t.apex.x - s * t.apex.y + dx, s * t.apex.x + c * t.apex.y + dy);
        let moved = build_view_triangle(moved_apex, t.orientation + theta, t.half_angle, t.side_length).unwrap();
        for (p, q) in t.vertices().iter().zip(moved.vertices()) {
            let expect = Point2::new(c * p.x - s * p.y + dx, s * p.x + c * p.y + dy);
            prop_assert!(expect.distance(q) < 1e-9);
        }
    }

    #[test]
    fn pair_weight_bounds(t in triangle_strategy(), px in -5.0..5.0f64, py in -5.0..5.0f64, scale in 0.5..5.0f64) {
        let region = t.polygon();
        let p = Point2::new(px, py);
        let r = t.apex;
        let v = integrate_pair_weights(&region, p, r, scale);
        let far = region.vertices().iter().map(|x| x.distance(p).max(x.distance(r))).fold(0.0, f64::max);
        let area = region.area();
        prop_assert!(v <= 2.0 * area * (1.0 + 1e-9));
        prop_assert!(v >= 2.0 * area * (-far / scale).exp() * (1.0 - 1e-9));
    }
}
