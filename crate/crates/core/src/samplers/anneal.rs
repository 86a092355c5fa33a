use rand::Rng;

use super::birth_death::{birth_death_change_step, PointConfiguration, PointMoves};
use super::mh::random_walk_proposal;
use super::{energy_delta, metropolis_accept, ChainRecord, MoveKind, Transition};
use crate::error::{Error, Result};
use crate::gibbs::{total_energy, AnnealingSchedule, EnergyModel, ParameterVector};
use crate::rng;

/// A Metropolis-Hastings kernel targeting `exp(-energy / T)`.
pub trait Kernel {
    type State: Clone;

    /// Untempered energy; `+inf` marks a forbidden state.
    fn energy(&self, state: &Self::State) -> Result<f64>;

    fn step<R: Rng + ?Sized>(
        &self,
        state: &Self::State,
        energy: f64,
        temperature: f64,
        rng: &mut R,
    ) -> Result<Transition<Self::State>>;
}

/// Random-walk kernel over a bounded parameter vector.
pub struct FixedDimKernel<F> {
    pub energy: F,
    pub scales: Vec<f64>,
    /// When set to `T_ref`, proposal scales are multiplied by
    /// `sqrt(T / T_ref)` so steps shrink as the temperature drops.
    pub reference_temperature: Option<f64>,
}

impl<F> FixedDimKernel<F>
where
    F: Fn(&ParameterVector) -> f64,
{
    pub fn new(energy: F, scales: Vec<f64>) -> Self {
        Self {
            energy,
            scales,
            reference_temperature: None,
        }
    }

    pub fn temperature_scaled(mut self, reference_temperature: f64) -> Self {
        self.reference_temperature = Some(reference_temperature);
        self
    }
}

impl<F> Kernel for FixedDimKernel<F>
where
    F: Fn(&ParameterVector) -> f64,
{
    type State = ParameterVector;

    fn energy(&self, state: &ParameterVector) -> Result<f64> {
        let e = (self.energy)(state);
        if e.is_nan() {
            return Err(Error::NanTarget {
                state: format!("{state:?}"),
            });
        }
        Ok(e)
    }

    fn step<R: Rng + ?Sized>(
        &self,
        state: &ParameterVector,
        energy: f64,
        temperature: f64,
        rng: &mut R,
    ) -> Result<Transition<ParameterVector>> {
        if self.scales.len() != state.len() {
            return Err(Error::invalid(
                "proposal scale count does not match dimension",
            ));
        }
        let factor = self
            .reference_temperature
            .map_or(1.0, |t_ref| (temperature / t_ref).sqrt());
        let proposal = random_walk_proposal(state, &self.scales, factor, rng);
        let e = self.energy(&proposal)?;
        let delta = energy_delta(energy, e);
        if metropolis_accept(-delta / temperature, rng) {
            Ok(Transition {
                state: proposal,
                energy: e,
                accepted: true,
                kind: MoveKind::Walk,
            })
        } else {
            Ok(Transition {
                state: state.clone(),
                energy,
                accepted: false,
                kind: MoveKind::Walk,
            })
        }
    }
}

/// Birth/death/change kernel over point configurations of a Gibbs model
/// with fixed parameters.
pub struct PointProcessKernel<'a, M: EnergyModel> {
    pub model: &'a M,
    pub theta: &'a ParameterVector,
    pub data: &'a M::Data,
    pub moves: PointMoves,
}

impl<M, C> Kernel for PointProcessKernel<'_, M>
where
    M: EnergyModel<State = C>,
    C: PointConfiguration,
{
    type State = C;

    fn energy(&self, state: &C) -> Result<f64> {
        total_energy(self.model, state, self.theta, self.data)
    }

    fn step<R: Rng + ?Sized>(
        &self,
        state: &C,
        energy: f64,
        temperature: f64,
        rng: &mut R,
    ) -> Result<Transition<C>> {
        birth_death_change_step(
            state,
            energy,
            self.model,
            self.theta,
            self.data,
            &self.moves,
            temperature,
            rng,
        )
    }
}

#[derive(Clone, Debug)]
pub struct AnnealOutcome<S> {
    /// Lowest-energy state visited at any point of the run.
    pub best: S,
    pub best_energy: f64,
    /// Final state of the chain.
    pub last: S,
    pub record: ChainRecord<S>,
    /// Best energy so far at every recorded step.
    pub best_trace: Vec<f64>,
}

/// Simulated annealing: `steps_per_level` kernel steps at each temperature of
/// the schedule's geometric ladder.
///
/// The chain record stores the energy (not the tempered log target) in
/// `log_targets` as `-energy`, together with the temperature of each step.
pub fn anneal<K: Kernel>(
    kernel: &K,
    initial: K::State,
    schedule: &AnnealingSchedule,
    record_every: usize,
    seed: u64,
) -> Result<AnnealOutcome<K::State>> {
    schedule.validate()?;
    if record_every == 0 {
        return Err(Error::invalid("record_every must be positive"));
    }
    let mut rng = rng::from_seed(seed);
    let mut record = ChainRecord::new(seed);
    let mut best_trace = Vec::new();

    let mut energy = kernel.energy(&initial)?;
    let mut state = initial;
    let mut best = state.clone();
    let mut best_energy = energy;
    let mut step = 0usize;

    for t in schedule.temperatures() {
        for _ in 0..schedule.steps_per_level {
            step += 1;
            let tr = kernel.step(&state, energy, t, &mut rng)?;
            record.count(tr.accepted);
            state = tr.state;
            energy = tr.energy;
            if energy < best_energy {
                best_energy = energy;
                best = state.clone();
            }
            if step.is_multiple_of(record_every) {
                record.push(step, state.clone(), -energy, tr.accepted, tr.kind, t);
                best_trace.push(best_energy);
            }
        }
    }

    Ok(AnnealOutcome {
        best,
        best_energy,
        last: state,
        record,
        best_trace,
    })
}
