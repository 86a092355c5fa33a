use std::f64::consts::TAU;

use crate::error::{Error, Result};

const MAX_ITER: usize = 100;

/// Eccentric anomaly `E` solving `E - e sin E = M` for an elliptic orbit.
///
/// `M` is first reduced to `[0, 2π)`; the result lies in
/// `[M - e, M + e]` for the reduced `M`. Newton steps are kept inside a
/// shrinking bracket and replaced by bisection whenever they leave it.
pub fn solve_kepler(mean_anomaly: f64, eccentricity: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eccentricity) {
        return Err(Error::invalid(format!(
            "eccentricity {eccentricity} outside [0, 1)"
        )));
    }
    if !mean_anomaly.is_finite() {
        return Err(Error::invalid("mean anomaly must be finite"));
    }
    let m = mean_anomaly.rem_euclid(TAU);
    let e = eccentricity;
    if e == 0.0 || m == 0.0 {
        return Ok(m);
    }
    let f = |x: f64| x - e * x.sin() - m;

    let (mut lo, mut hi) = (m - e, m + e);
    // starting guess that behaves well for high eccentricity
    let mut x = if e > 0.8 {
        std::f64::consts::PI.clamp(lo, hi)
    } else {
        m + e * m.sin()
    };
    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx.abs() <= 1e-15 * (1.0 + m) {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = 1.0 - e * x.cos();
        let newton = x - fx / d;
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    if f(x).abs() < 1e-12 {
        Ok(x)
    } else {
        Err(Error::NonConvergence {
            what: format!("Kepler equation M = {mean_anomaly}, e = {eccentricity}"),
            iterations: MAX_ITER,
        })
    }
}
