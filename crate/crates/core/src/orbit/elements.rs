use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::kepler::solve_kepler;
use crate::error::{Error, Result};

/// Parameter names in sampling order.
pub const ELEMENT_NAMES: [&str; 7] = [
    "period",
    "semi_major_axis",
    "eccentricity",
    "inclination",
    "ascending_node",
    "arg_periapsis",
    "time_periapsis",
];

/// Row labels of the summary, same order as [`ELEMENT_NAMES`].
pub const ELEMENT_LABELS: [&str; 7] = [
    "Period, days",
    "Semi-major axis, km",
    "Eccentricity",
    "Inclination, deg",
    "Longitude of asc. node, deg",
    "Argument of periapsis, deg",
    "Time of periapsis, RJD",
];

const GRAVITATIONAL_CONSTANT: f64 = 6.674_30e-11;

/// Relative orbit of the secondary about the primary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeplerOrbit {
    /// days
    pub period: f64,
    /// km
    pub semi_major_axis: f64,
    pub eccentricity: f64,
    /// degrees, `[0, 180]`
    pub inclination: f64,
    /// degrees, `[0, 360)`
    pub ascending_node: f64,
    /// degrees, `[0, 360)`
    pub arg_periapsis: f64,
    /// reduced Julian date
    pub time_periapsis: f64,
}

impl KeplerOrbit {
    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0) || !self.period.is_finite() {
            return Err(Error::invalid("period must be positive"));
        }
        if !(self.semi_major_axis > 0.0) || !self.semi_major_axis.is_finite() {
            return Err(Error::invalid("semi-major axis must be positive"));
        }
        if !(0.0..1.0).contains(&self.eccentricity) {
            return Err(Error::invalid("eccentricity must lie in [0, 1)"));
        }
        if ![
            self.inclination,
            self.ascending_node,
            self.arg_periapsis,
            self.time_periapsis,
        ]
        .iter()
        .all(|v| v.is_finite())
        {
            return Err(Error::invalid("orbit angles and epoch must be finite"));
        }
        Ok(())
    }

    /// Same orbit with angles mapped to their canonical ranges.
    ///
    /// An inclination outside `[0, 180]` is folded back with the node shifted
    /// by 180° and the argument of periapsis adjusted so that the orbit in
    /// space is unchanged.
    pub fn normalized(&self) -> Self {
        let mut o = *self;
        let mut i = o.inclination.rem_euclid(360.0);
        if i > 180.0 {
            i = 360.0 - i;
            o.ascending_node += 180.0;
            o.arg_periapsis += 180.0;
        }
        o.inclination = i;
        o.ascending_node = wrap360(o.ascending_node);
        o.arg_periapsis = wrap360(o.arg_periapsis);
        o
    }

    pub fn to_array(&self) -> [f64; 7] {
        [
            self.period,
            self.semi_major_axis,
            self.eccentricity,
            self.inclination,
            self.ascending_node,
            self.arg_periapsis,
            self.time_periapsis,
        ]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            period: v[0],
            semi_major_axis: v[1],
            eccentricity: v[2],
            inclination: v[3],
            ascending_node: v[4],
            arg_periapsis: v[5],
            time_periapsis: v[6],
        }
    }

    /// Sky-plane relative position `(Δx, Δy)` in km at `epoch`.
    ///
    /// The in-plane position `(a(cos E − e), a√(1−e²) sin E)` is rotated by
    /// ω about the orbit normal, by i about the line of nodes and by Ω about
    /// the line of sight; the first two rotated components are returned.
    pub fn propagate(&self, epoch: f64) -> Result<(f64, f64)> {
        let mean_anomaly = TAU * (epoch - self.time_periapsis) / self.period;
        let e = self.eccentricity;
        let ecc_anomaly = solve_kepler(mean_anomaly, e)?;
        let a = self.semi_major_axis;
        let xp = a * (ecc_anomaly.cos() - e);
        let yp = a * (1.0 - e * e).sqrt() * ecc_anomaly.sin();

        let (so, co) = self.ascending_node.to_radians().sin_cos();
        let (sw, cw) = self.arg_periapsis.to_radians().sin_cos();
        let ci = self.inclination.to_radians().cos();

        let dx = xp * (co * cw - so * sw * ci) - yp * (co * sw + so * cw * ci);
        let dy = xp * (so * cw + co * sw * ci) + yp * (co * cw * ci - so * sw);
        Ok((dx, dy))
    }

    /// Total system mass in kg implied by Kepler's third law.
    pub fn system_mass_kg(&self) -> f64 {
        let a_m = self.semi_major_axis * 1e3;
        let p_s = self.period * 86_400.0;
        4.0 * std::f64::consts::PI.powi(2) * a_m.powi(3) / (GRAVITATIONAL_CONSTANT * p_s * p_s)
    }
}

fn wrap360(v: f64) -> f64 {
    let r = v.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(e: f64) -> KeplerOrbit {
        KeplerOrbit {
            period: 10.0,
            semi_major_axis: 1000.0,
            eccentricity: e,
            inclination: 0.0,
            ascending_node: 0.0,
            arg_periapsis: 0.0,
            time_periapsis: 100.0,
        }
    }

    #[test]
    fn periapsis_and_apoapsis() {
        let o = flat(0.5);
        let (x, y) = o.propagate(100.0).unwrap();
        assert!((x - 500.0).abs() < 1e-9 && y.abs() < 1e-9);
        let (x, y) = o.propagate(105.0).unwrap();
        assert!((x + 1500.0).abs() < 1e-9 && y.abs() < 1e-6, "{x} {y}");
    }

    #[test]
    fn periodic_in_time_and_node() {
        let o = KeplerOrbit {
            inclination: 46.883,
            ascending_node: 75.125,
            arg_periapsis: 43.152,
            ..flat(0.4958)
        };
        let mut o2 = o;
        o2.ascending_node += 360.0;
        for k in 0..50 {
            let t = 100.0 + 0.37 * k as f64;
            let a = o.propagate(t).unwrap();
            let b = o.propagate(t + o.period).unwrap();
            let c = o2.propagate(t).unwrap();
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
            assert!((a.0 - c.0).abs() < 1e-9 && (a.1 - c.1).abs() < 1e-9);
        }
    }

    #[test]
    fn normalization_preserves_positions() {
        let o = KeplerOrbit {
            inclination: 200.0,
            ascending_node: -30.0,
            arg_periapsis: 400.0,
            ..flat(0.3)
        };
        let n = o.normalized();
        assert!((0.0..=180.0).contains(&n.inclination));
        assert!((0.0..360.0).contains(&n.ascending_node));
        assert!((0.0..360.0).contains(&n.arg_periapsis));
        for k in 0..20 {
            let t = 100.0 + 0.5 * k as f64;
            let a = o.propagate(t).unwrap();
            let b = n.propagate(t).unwrap();
            assert!(
                (a.0 - b.0).abs() < 1e-8 && (a.1 - b.1).abs() < 1e-8,
                "{a:?} {b:?}"
            );
        }
    }

    #[test]
    fn validation() {
        assert!(flat(0.5).validate().is_ok());
        assert!(flat(1.0).validate().is_err());
        assert!(KeplerOrbit {
            period: 0.0,
            ..flat(0.1)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn mass_is_positive() {
        let m = flat(0.1).system_mass_kg();
        assert!(m > 0.0 && m.is_finite());
    }
}
