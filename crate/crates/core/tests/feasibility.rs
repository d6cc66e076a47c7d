mod common;

use std::collections::BTreeSet;

use common::oracles;
use passfeas_core::feasibility::*;
use passfeas_core::geometry::{angle_of, FieldSpec, Point2};
use rand::prelude::*;

#[test]
fn orientation_matches_monte_carlo() {
    let params = ModelParams::default();
    let mut rng = oracles::rng(2024);
    let c = oracles::mc_orientation_integral(0.0, 0.0, 180.0, 30.0, 1.0, 2.0, 1_000_000, &mut rng);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let phi_p: f64 = rng.random_range(0.0..360.0);
        let bearing = phi_p + rng.random_range(-40.0..40.0);
        let phi_r = bearing + 180.0 + rng.random_range(-80.0..80.0);
        let dist = rng.random_range(3.0..40.0);
        let passer = PlayerState::new("P", Point2::new(50.0, 30.0)).with_orientation(phi_p.rem_euclid(360.0));
        let receiver = PlayerState::new("R", Point2::new(50.0, 30.0).offset(bearing, dist))
            .with_orientation(phi_r.rem_euclid(360.0));
        let got = orientation_feasibility(&passer, &receiver, &params).unwrap();
        let mc = oracles::mc_orientation_integral(phi_p, bearing, phi_r, 30.0, 1.0, 2.0, 200_000, &mut rng);
        let expect = (mc / c).min(1.0);
        worst = worst.max((got - expect).abs());
    }
    assert!(worst <= 2e-2, "worst deviation {worst}");
}

#[test]
fn projection_preserves_bearings() {
    let mut rng = oracles::rng(5);
    let passer = PlayerState::new("P", Point2::new(40.0, 20.0));
    let receivers: Vec<PlayerState> = (0..100)
        .map(|i| PlayerState::new(format!("R{i}"), Point2::new(rng.random_range(0.0..105.0), rng.random_range(0.0..68.0))))
        .collect();
    let projected = project_to_circle(&passer, &receivers, 1.0).unwrap();
    for (r, p) in receivers.iter().zip(&projected) {
        let before = angle_of(passer.position, r.position).unwrap();
        let after = angle_of(passer.position, *p).unwrap();
        let d = (before - after).abs();
        assert!(d.min(360.0 - d) < 1e-9);
        assert!((p.distance(passer.position) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn passer_pressure_bounds() {
    let params = ModelParams::default();
    let mut rng = oracles::rng(8);
    for _ in 0..200 {
        let s = oracles::random_scenario(&mut rng, 10, 11);
        for r in &s.receivers {
            let (v, n) = passer_defense_feasibility(&s, &r.id, &params).unwrap();
            assert!(((-2f64).exp()..=1.0).contains(&v), "{v}");
            assert_eq!(n.len(), s.defenders.len().min(3));
        }
    }
}

fn mirror_about_line(p: Point2, a: Point2, dir: Point2) -> Point2 {
    let rel = p.sub(a);
    let t = rel.x * dir.x + rel.y * dir.y;
    let foot = a.add(dir.scale(t));
    foot.scale(2.0).sub(p)
}

#[test]
fn receiver_pressure_is_mirror_symmetric_about_passing_line() {
    let params = ModelParams::default();
    let mut rng = oracles::rng(9);
    for _ in 0..100 {
        let s = oracles::random_scenario(&mut rng, 4, 11);
        let r = &s.receivers[0];
        let d = r.position.sub(s.passer.position);
        let dir = d.scale(1.0 / d.x.hypot(d.y));
        let a = s.passer.position;
        let line_deg = angle_of(a, r.position).unwrap();
        let m = s.map_players(|p| mirror_about_line(p, a, dir), |o| (2.0 * line_deg - o).rem_euclid(360.0));
        let (_, np) = passer_defense_feasibility(&s, &r.id, &params).unwrap();
        let ex: BTreeSet<String> = np.iter().map(|n| n.id.clone()).collect();
        let (v1, _) = receiver_defense_feasibility(&s, &r.id, &ex, &params).unwrap();
        let (v2, _) = receiver_defense_feasibility(&m, &r.id, &ex, &params).unwrap();
        assert!((v1 - v2).abs() < 1e-9, "{v1} vs {v2}");
    }
}

#[test]
fn removing_the_only_defender_lifts_pressure_to_one() {
    let params = ModelParams::default();
    let mut rng = oracles::rng(10);
    for _ in 0..50 {
        let mut s = oracles::random_scenario(&mut rng, 5, 1);
        if s.defenders.is_empty() {
            continue;
        }
        let before: Vec<f64> = breakdowns(&s, &params).unwrap().iter().map(|b| b.f_d).collect();
        s.defenders.clear();
        for (b, old) in breakdowns(&s, &params).unwrap().iter().zip(before) {
            assert_eq!(b.f_d, 1.0);
            assert!(b.f_d >= old);
        }
    }
}

#[test]
fn combined_mode_is_product_of_single_modes() {
    let params = ModelParams::default();
    let mut rng = oracles::rng(12);
    for _ in 0..50 {
        let s = oracles::random_scenario(&mut rng, 10, 11);
        let f = evaluate_scenario(&s, &params, Mode::F).unwrap();
        let fo = evaluate_scenario(&s, &params, Mode::Fo).unwrap();
        let fd = evaluate_scenario(&s, &params, Mode::Fd).unwrap();
        let fp = evaluate_scenario(&s, &params, Mode::Fp).unwrap();
        for i in 0..s.receivers.len() {
            let b = &f.receivers[i].breakdown;
            let product = fo.receivers[i].breakdown.score(Mode::Fo).unwrap()
                * fd.receivers[i].breakdown.score(Mode::Fd).unwrap()
                * fp.receivers[i].breakdown.score(Mode::Fp).unwrap();
            assert!((b.f.unwrap() - product).abs() <= 1e-12);
            assert!(b.f.unwrap() <= b.f_o.unwrap().min(b.f_d).min(b.f_p) + 1e-15);
        }
    }
}

#[test]
fn argmax_matches_exhaustive_scan() {
    let params = ModelParams::default();
    let mut rng = oracles::rng(13);
    for _ in 0..50 {
        let s = oracles::random_scenario(&mut rng, 10, 11);
        let ev = evaluate_scenario(&s, &params, Mode::F).unwrap();
        let mut best: Option<(f64, f64, f64, String)> = None;
        for r in &s.receivers {
            let fo = orientation_feasibility(&s.passer, r, &params).unwrap();
            let (dp, np) = passer_defense_feasibility(&s, &r.id, &params).unwrap();
            let ex = np.iter().map(|n| n.id.clone()).collect();
            let (dr, _) = receiver_defense_feasibility(&s, &r.id, &ex, &params).unwrap();
            let f = fo * dp * dr * proximity_feasibility(&s.passer, r, &s.field);
            let d = s.field.normalized_distance(s.passer.position, r.position);
            let better = match &best {
                None => true,
                Some((bf, bo, bd, bid)) => {
                    f > *bf || (f == *bf && (fo > *bo || (fo == *bo && (d < *bd || (d == *bd && r.id < *bid)))))
                }
            };
            if better {
                best = Some((f, fo, d, r.id.clone()));
            }
        }
        assert_eq!(ev.best(), best.unwrap().3);
    }
}

#[test]
fn field_scale_changes_nothing_when_coscaled() {
    let params = ModelParams::default();
    let mut rng = oracles::rng(14);
    let s = oracles::random_scenario(&mut rng, 10, 11);
    let mut big = s.map_players(|p| p.scale(3.0), |o| o);
    big.field = FieldSpec {
        length: s.field.length * 3.0,
        width: s.field.width * 3.0,
        ..s.field
    };
    let a = breakdowns(&s, &params).unwrap();
    let b = breakdowns(&big, &params).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.f.unwrap() - y.f.unwrap()).abs() < 1e-9);
    }
}
