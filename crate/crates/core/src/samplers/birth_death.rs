use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{energy_delta, metropolis_accept, MoveKind, MoveMix, Transition};
use crate::error::{Error, Result};
use crate::gibbs::{total_energy, EnergyModel, ParameterVector};

/// A finite configuration of marked objects in a bounded window.
///
/// `sample_object` must draw from the reference mark law (uniform location
/// in the window, marks from their reference distribution), and `perturb`
/// must be a symmetric proposal with respect to that law.
pub trait PointConfiguration: Clone {
    type Object: Clone;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lebesgue measure of the window `|W|`.
    fn volume(&self) -> f64;

    fn sample_object<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Object;

    fn perturb<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> Self::Object;

    fn insert(&mut self, object: Self::Object);

    fn remove(&mut self, index: usize) -> Self::Object;

    fn replace(&mut self, index: usize, object: Self::Object);
}

/// Move probabilities plus the intensity `λ` of the Poisson reference process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMoves {
    pub mix: MoveMix,
    pub intensity: f64,
}

impl PointMoves {
    pub fn new(mix: MoveMix, intensity: f64) -> Result<Self> {
        mix.validate()?;
        if !(intensity > 0.0) || !intensity.is_finite() {
            return Err(Error::invalid("reference intensity must be positive"));
        }
        Ok(Self { mix, intensity })
    }
}

/// One birth, death or change move at `temperature`.
///
/// Acceptance ratios, with `n` the current size and `ΔU` the change in total
/// energy:
///
/// * birth: `λ|W| / (n+1) · p_death/p_birth · exp(-ΔU/T)`
/// * death: `n / (λ|W|) · p_birth/p_death · exp(-ΔU/T)`
/// * change: `exp(-ΔU/T)`
///
/// Death or change on an empty configuration is a rejected move.
#[allow(clippy::too_many_arguments)]
pub fn birth_death_change_step<M, C, R>(
    config: &C,
    current_energy: f64,
    model: &M,
    theta: &ParameterVector,
    data: &M::Data,
    moves: &PointMoves,
    temperature: f64,
    rng: &mut R,
) -> Result<Transition<C>>
where
    M: EnergyModel<State = C>,
    C: PointConfiguration,
    R: Rng + ?Sized,
{
    if !(temperature > 0.0) {
        return Err(Error::invalid("temperature must be positive"));
    }
    let kind = moves.mix.choose(rng);
    let n = config.len();
    let reject = |kind| Transition {
        state: config.clone(),
        energy: current_energy,
        accepted: false,
        kind,
    };
    let lam_w = moves.intensity * config.volume();

    let (proposal, log_factor) = match kind {
        MoveKind::Birth => {
            let mut next = config.clone();
            next.insert(config.sample_object(rng));
            let f = (lam_w / (n as f64 + 1.0)).ln() + (moves.mix.death / moves.mix.birth).ln();
            (next, f)
        }
        MoveKind::Death => {
            if n == 0 {
                return Ok(reject(kind));
            }
            let i = rng.random_range(0..n);
            let mut next = config.clone();
            next.remove(i);
            let f = (n as f64 / lam_w).ln() + (moves.mix.birth / moves.mix.death).ln();
            (next, f)
        }
        MoveKind::Change => {
            if n == 0 {
                return Ok(reject(kind));
            }
            let i = rng.random_range(0..n);
            let obj = config.perturb(i, rng);
            let mut next = config.clone();
            next.replace(i, obj);
            (next, 0.0)
        }
        MoveKind::Walk => unreachable!("move mix never yields a walk"),
    };

    let energy = total_energy(model, &proposal, theta, data)?;
    let delta = energy_delta(current_energy, energy);
    if delta == f64::INFINITY {
        return Ok(reject(kind));
    }
    let log_ratio = log_factor - delta / temperature;
    if metropolis_accept(log_ratio, rng) {
        Ok(Transition {
            state: proposal,
            energy,
            accepted: true,
            kind,
        })
    } else {
        Ok(reject(kind))
    }
}
