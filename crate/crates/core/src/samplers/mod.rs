//! Metropolis-Hastings kernels and the simulated-annealing driver.
//!
//! Two state spaces are covered: fixed-dimension parameter vectors (random
//! walk with reflection/wrapping at the bounds) and variable-dimension point
//! configurations (birth, death and change moves with the Geyer-Møller
//! acceptance ratios for a Poisson reference process).

mod anneal;
mod birth_death;
mod chain;
mod mh;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use anneal::{anneal, AnnealOutcome, FixedDimKernel, Kernel, PointProcessKernel};
pub use birth_death::{birth_death_change_step, PointConfiguration, PointMoves};
pub use chain::{ChainRecord, ChainSidecar, FlatState};
pub use mh::{mh_fixed_dim_step, random_walk_proposal, sample_fixed_dim, MhStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Walk,
    Birth,
    Death,
    Change,
}

impl MoveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::Walk => "walk",
            MoveKind::Birth => "birth",
            MoveKind::Death => "death",
            MoveKind::Change => "change",
        }
    }
}

/// Probabilities of proposing a birth, a death or a change.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveMix {
    pub birth: f64,
    pub death: f64,
    pub change: f64,
}

impl Default for MoveMix {
    fn default() -> Self {
        Self {
            birth: 0.4,
            death: 0.4,
            change: 0.2,
        }
    }
}

impl MoveMix {
    pub fn new(birth: f64, death: f64, change: f64) -> Result<Self> {
        let m = Self {
            birth,
            death,
            change,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let p = [self.birth, self.death, self.change];
        if p.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::invalid("move probabilities must be nonnegative"));
        }
        if (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("move probabilities must sum to 1"));
        }
        Ok(())
    }

    pub(crate) fn choose<R: Rng + ?Sized>(&self, rng: &mut R) -> MoveKind {
        let u: f64 = rng.random();
        if u < self.birth {
            MoveKind::Birth
        } else if u < self.birth + self.death {
            MoveKind::Death
        } else {
            MoveKind::Change
        }
    }
}

/// Outcome of one kernel application.
#[derive(Clone, Debug)]
pub struct Transition<S> {
    pub state: S,
    /// Untempered energy of `state`.
    pub energy: f64,
    pub accepted: bool,
    pub kind: MoveKind,
}

/// Metropolis decision for a proposal with log acceptance ratio
/// `log_ratio`. `+inf` always accepts, `-inf` and NaN always reject.
pub fn metropolis_accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    if log_ratio.is_nan() || log_ratio == f64::NEG_INFINITY {
        return false;
    }
    if log_ratio >= 0.0 {
        return true;
    }
    let u: f64 = rng.random();
    u.ln() < log_ratio
}

/// Energy difference `new - old` with hard-core conventions: leaving a
/// forbidden state is always downhill, entering one never allowed.
pub(crate) fn energy_delta(old: f64, new: f64) -> f64 {
    if new == f64::INFINITY {
        f64::INFINITY
    } else if old == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        new - old
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn move_mix_validation() {
        assert!(MoveMix::new(0.5, 0.5, 0.0).is_ok());
        assert!(MoveMix::new(0.5, 0.6, 0.0).is_err());
        assert!(MoveMix::new(-0.1, 0.6, 0.5).is_err());
        let m = MoveMix::default();
        assert!((m.birth + m.death + m.change - 1.0).abs() < 1e-12);
    }

    #[test]
    fn accept_edge_cases() {
        let mut r = rng::from_seed(1);
        assert!(metropolis_accept(0.0, &mut r));
        assert!(metropolis_accept(f64::INFINITY, &mut r));
        assert!(!metropolis_accept(f64::NEG_INFINITY, &mut r));
        assert!(!metropolis_accept(f64::NAN, &mut r));
    }

    #[test]
    fn two_state_acceptance_rates() {
        // π(high)/π(low) = e: low→high always accepted, high→low w.p. 1/e
        let mut r = rng::from_seed(11);
        let n = 100_000;
        let up = (0..n).filter(|_| metropolis_accept(1.0, &mut r)).count() as f64 / n as f64;
        let down = (0..n).filter(|_| metropolis_accept(-1.0, &mut r)).count() as f64 / n as f64;
        assert_eq!(up, 1.0);
        assert!((down - (-1.0f64).exp()).abs() < 0.01, "down = {down}");
    }
}
