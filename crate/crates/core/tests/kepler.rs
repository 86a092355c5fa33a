use std::f64::consts::{PI, TAU};

use astrogibbs::orbit::{solve_kepler, KeplerOrbit};
use proptest::prelude::*;

/// Plain bisection on `[0, 2π]`; slow but independent of the solver.
fn bisect(m: f64, e: f64) -> f64 {
    let m = m.rem_euclid(TAU);
    let (mut lo, mut hi) = (0.0_f64, TAU);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid - e * mid.sin() - m < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn grid_residuals_and_bisection() {
    let mut worst_res = 0.0_f64;
    let mut worst_gap = 0.0_f64;
    for i in 0..1000 {
        let m = TAU * i as f64 / 1000.0;
        for j in 0..100 {
            let e = 0.99 * j as f64 / 99.0;
            let big_e = solve_kepler(m, e).unwrap();
            worst_res = worst_res.max((big_e - e * big_e.sin() - m).abs());
            worst_gap = worst_gap.max((big_e - bisect(m, e)).abs());
        }
    }
    assert!(worst_res < 1e-12, "residual {worst_res:e}");
    assert!(worst_gap < 1e-10, "bisection gap {worst_gap:e}");
}

#[test]
fn invalid_eccentricity_rejected() {
    assert!(solve_kepler(1.0, 1.0).is_err());
    assert!(solve_kepler(1.0, -0.1).is_err());
    assert!(solve_kepler(f64::NAN, 0.5).is_err());
}

/// Sky position through the true anomaly and the textbook Thiele-Innes form.
fn oracle_position(o: &KeplerOrbit, t: f64) -> (f64, f64) {
    let m = TAU * (t - o.time_periapsis) / o.period;
    let e = o.eccentricity;
    let big_e = bisect(m, e);
    let nu = 2.0 * (((1.0 + e) / (1.0 - e)).sqrt() * (big_e / 2.0).tan()).atan();
    let r = o.semi_major_axis * (1.0 - e * big_e.cos());
    let (om, w, i) = (
        o.ascending_node.to_radians(),
        o.arg_periapsis.to_radians(),
        o.inclination.to_radians(),
    );
    let u = w + nu;
    let x = r * (om.cos() * u.cos() - om.sin() * u.sin() * i.cos());
    let y = r * (om.sin() * u.cos() + om.cos() * u.sin() * i.cos());
    (x, y)
}

fn reference_orbit() -> KeplerOrbit {
    KeplerOrbit {
        period: 56.5330,
        semi_major_axis: 4936.0,
        eccentricity: 0.4958,
        inclination: 46.883,
        ascending_node: 75.125,
        arg_periapsis: 43.152,
        time_periapsis: 54314.26,
    }
}

#[test]
fn propagate_matches_true_anomaly_form() {
    let o = reference_orbit();
    for k in 0..500 {
        let t = 54300.0 + 0.37 * k as f64;
        let (x, y) = o.propagate(t).unwrap();
        let (ox, oy) = oracle_position(&o, t);
        assert!((x - ox).abs() < 1e-6 && (y - oy).abs() < 1e-6, "t {t}");
    }
}

#[test]
fn periapsis_lies_on_line_of_apsides() {
    let o = KeplerOrbit {
        inclination: 0.0,
        ascending_node: 0.0,
        arg_periapsis: 0.0,
        ..reference_orbit()
    };
    let (x, y) = o.propagate(o.time_periapsis).unwrap();
    let q = o.semi_major_axis * (1.0 - o.eccentricity);
    assert!((x - q).abs() < 1e-9 && y.abs() < 1e-9);
    let (x, _) = o.propagate(o.time_periapsis + o.period / 2.0).unwrap();
    assert!((x + o.semi_major_axis * (1.0 + o.eccentricity)).abs() < 1e-6);
}

proptest! {
    #[test]
    fn solver_residual_anywhere(m in -100.0..100.0f64, e in 0.0..0.999f64) {
        let big_e = solve_kepler(m, e).unwrap();
        let mr = m.rem_euclid(TAU);
        prop_assert!((big_e - e * big_e.sin() - mr).abs() < 1e-12);
    }

    #[test]
    fn orbit_is_periodic(t in 54000.0..55000.0f64, e in 0.0..0.95f64) {
        let o = KeplerOrbit { eccentricity: e, ..reference_orbit() };
        let (a, b) = o.propagate(t).unwrap();
        let (c, d) = o.propagate(t + o.period).unwrap();
        prop_assert!((a - c).abs() < 1e-6 && (b - d).abs() < 1e-6);
    }

    #[test]
    fn separation_between_periapsis_and_apoapsis(t in 54000.0..55000.0f64, i in 0.0..PI) {
        // the face-on projection preserves radius
        let o = KeplerOrbit { inclination: 0.0, ascending_node: i.to_degrees(), ..reference_orbit() };
        let (x, y) = o.propagate(t).unwrap();
        let r = x.hypot(y);
        let a = o.semi_major_axis;
        prop_assert!(r >= a * (1.0 - o.eccentricity) - 1e-6);
        prop_assert!(r <= a * (1.0 + o.eccentricity) + 1e-6);
    }
}
