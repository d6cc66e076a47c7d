//! Independent reference computations for tests. Nothing here calls the
//! code paths it is used to check.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};
use passfeas_core::feasibility::{PlayerState, Role, Scenario};
use passfeas_core::geometry::{AttackDirection, FieldSpec, Point2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

type Tri = [(f64, f64); 3];

fn view_triangle(apex: (f64, f64), dir_deg: f64, half_deg: f64, side: f64) -> Tri {
    let at = |deg: f64| {
        let r = deg * std::f64::consts::PI / 180.0;
        (apex.0 + side * r.cos(), apex.1 + side * r.sin())
    };
    [apex, at(dir_deg - half_deg), at(dir_deg + half_deg)]
}

fn inside(t: &Tri, p: (f64, f64)) -> bool {
    let s = |a: (f64, f64), b: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    let d = [s(t[0], t[1]), s(t[1], t[2]), s(t[2], t[0])];
    d.iter().all(|v| *v >= 0.0) || d.iter().all(|v| *v <= 0.0)
}

fn tri_area(t: &Tri) -> f64 {
    0.5 * ((t[1].0 - t[0].0) * (t[2].1 - t[0].1) - (t[2].0 - t[0].0) * (t[1].1 - t[0].1)).abs()
}

/// Monte Carlo estimate of the unnormalized orientation integral. The
/// passer sits at the origin; the receiver is already projected to radius
/// `z` at bearing `bearing_deg`. Samples are uniform in the receiver
/// triangle, which contains the intersection.
pub fn mc_orientation_integral(
    phi_p: f64,
    bearing_deg: f64,
    phi_r: f64,
    psi: f64,
    z: f64,
    scale: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> f64 {
    let b = bearing_deg.to_radians();
    let r = (z * b.cos(), z * b.sin());
    let tp = view_triangle((0.0, 0.0), phi_p, psi, 2.0 * z);
    let tr = view_triangle(r, phi_r, psi, z);
    let mut acc = 0.0;
    for _ in 0..samples {
        let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        let x = (
            tr[0].0 + u * (tr[1].0 - tr[0].0) + v * (tr[2].0 - tr[0].0),
            tr[0].1 + u * (tr[1].1 - tr[0].1) + v * (tr[2].1 - tr[0].1),
        );
        if inside(&tp, x) {
            let dp = x.0.hypot(x.1);
            let dr = (x.0 - r.0).hypot(x.1 - r.1);
            acc += (-dp / scale).exp() + (-dr / scale).exp();
        }
    }
    tri_area(&tr) * acc / samples as f64
}

/// Monte Carlo estimate of `2 * ∫ exp(-|x - c|) dx` over `[x0,x1]x[y0,y1]`.
pub fn mc_square_pair_integral(c: (f64, f64), lo: (f64, f64), hi: (f64, f64), samples: usize, rng: &mut impl Rng) -> f64 {
    let mut acc = 0.0;
    for _ in 0..samples {
        let x = lo.0 + (hi.0 - lo.0) * rng.random::<f64>();
        let y = lo.1 + (hi.1 - lo.1) * rng.random::<f64>();
        acc += 2.0 * (-(x - c.0).hypot(y - c.1)).exp();
    }
    (hi.0 - lo.0) * (hi.1 - lo.1) * acc / samples as f64
}

fn arc(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % 360.0;
    d.min(360.0 - d)
}

/// Circular median by exhaustive search: the sample minimizing the summed
/// arc distance to all samples; near-ties resolved toward the circular mean, then clockwise.
pub fn circular_median_oracle(samples: &[f64]) -> f64 {
    let cost = |c: f64| samples.iter().map(|s| arc(*s, c)).sum::<f64>();
    let best = samples.iter().map(|c| cost(*c)).fold(f64::INFINITY, f64::min);
    let (s, c) = samples
        .iter()
        .fold((0.0, 0.0), |(s, c), a| (s + a.to_radians().sin(), c + a.to_radians().cos()));
    let mean = s.atan2(c).to_degrees();
    let mut tied: Vec<f64> = samples.iter().copied().filter(|c| cost(*c) <= best + 1e-9).collect();
    let nearest = tied.iter().map(|c| arc(*c, mean)).fold(f64::INFINITY, f64::min);
    tied.retain(|c| arc(*c, mean) <= nearest + 1e-9);
    // Equidistant from the mean: the one clockwise of it.
    let signed = |c: f64| {
        let d = (c - mean).rem_euclid(360.0);
        if d > 180.0 { d - 360.0 } else { d }
    };
    tied.sort_by(|a, b| signed(*a).total_cmp(&signed(*b)));
    tied[0]
}

pub fn rational(v: f64) -> BigRational {
    BigRational::from_f64(v).expect("finite")
}

/// Exact mean of the values as a rational.
pub fn exact_rational_mean(values: &[f64]) -> BigRational {
    let sum = values.iter().fold(BigRational::from_integer(BigInt::from(0)), |acc, v| acc + rational(*v));
    sum / BigRational::from_integer(BigInt::from(values.len()))
}

/// True when `v` is the double nearest to `exact` (ties either way).
pub fn is_nearest_double(v: f64, exact: &BigRational) -> bool {
    let err = (rational(v) - exact).abs();
    let up = rational(v.next_up());
    let down = rational(v.next_down());
    err <= (up - exact).abs() && err <= (down - exact).abs()
}

/// Cell indices whose centers lie within `q_m` of `r` or `s_m / 2` of the
/// segment `p`-`r`, by scanning the whole grid.
pub fn brute_force_region(field: &FieldSpec, w: usize, h: usize, p: Point2, r: Point2, q_m: f64, s_m: f64) -> Vec<usize> {
    let mut out = Vec::new();
    for row in 0..h {
        for col in 0..w {
            let cx = (col as f64 + 0.5) * field.length / w as f64;
            let cy = (row as f64 + 0.5) * field.width / h as f64;
            let in_disc = (cx - r.x).hypot(cy - r.y) <= q_m;
            let (dx, dy) = (r.x - p.x, r.y - p.y);
            let t = (((cx - p.x) * dx + (cy - p.y) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            let in_tube = (cx - (p.x + t * dx)).hypot(cy - (p.y + t * dy)) <= 0.5 * s_m;
            if in_disc || in_tube {
                out.push(row * w + col);
            }
        }
    }
    out
}

/// Random scenario with every offensive player oriented. Positions are
/// anywhere on a 105 x 68 pitch.
pub fn random_scenario(rng: &mut impl Rng, max_receivers: usize, max_defenders: usize) -> Scenario {
    let field = FieldSpec::new(105.0, 68.0, AttackDirection::PositiveX).unwrap();
    let pos = |rng: &mut dyn RngCore| Point2::new(rng.random_range(0.0..105.0), rng.random_range(0.0..68.0));
    let roles = [Role::Defender, Role::Midfielder, Role::Forward];
    let passer = PlayerState::new("P", pos(rng))
        .with_orientation(rng.random_range(0.0..360.0))
        .with_role(roles[rng.random_range(0..3)]);
    let n_r = rng.random_range(1..=max_receivers);
    let receivers = (0..n_r)
        .map(|i| {
            PlayerState::new(format!("R{i}"), pos(rng))
                .with_orientation(rng.random_range(0.0..360.0))
                .with_role(roles[rng.random_range(0..3)])
        })
        .collect();
    let n_d = rng.random_range(0..=max_defenders);
    let defenders = (0..n_d).map(|i| PlayerState::new(format!("D{i}"), pos(rng))).collect();
    Scenario {
        field,
        passer,
        receivers,
        defenders,
        ground_truth_receiver: None,
        success: None,
    }
}
