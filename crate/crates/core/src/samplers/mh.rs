use rand::Rng;
use rand_distr::StandardNormal;

use super::{metropolis_accept, ChainRecord, MoveKind};
use crate::error::{Error, Result};
use crate::gibbs::ParameterVector;
use crate::rng;

#[derive(Clone, Debug)]
pub struct MhStep {
    pub next: ParameterVector,
    pub log_target: f64,
    pub accepted: bool,
}

fn check_scales(current: &ParameterVector, scales: &[f64]) -> Result<()> {
    if scales.len() != current.len() {
        return Err(Error::invalid(format!(
            "{} proposal scales for {} parameters",
            scales.len(),
            current.len()
        )));
    }
    if scales.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::invalid(
            "proposal scales must be finite and nonnegative",
        ));
    }
    Ok(())
}

/// Independent Gaussian perturbation of every coordinate, folded back into
/// the parameter bounds. The kernel is symmetric in (current, proposal).
pub fn random_walk_proposal<R: Rng + ?Sized>(
    current: &ParameterVector,
    scales: &[f64],
    scale_factor: f64,
    rng: &mut R,
) -> ParameterVector {
    let values = current
        .values()
        .iter()
        .zip(current.specs())
        .zip(scales)
        .map(|((&v, spec), &s)| {
            let z: f64 = rng.sample(StandardNormal);
            let step = s * scale_factor;
            if step == 0.0 {
                v
            } else {
                spec.fold(v + step * z)
            }
        })
        .collect();
    current.with_folded(values)
}

/// One random-walk Metropolis step.
///
/// `current_log_target` must be `log_target(current)`; passing it in avoids
/// re-evaluating the target at the current state.
pub fn mh_fixed_dim_step<F, R>(
    current: &ParameterVector,
    current_log_target: f64,
    mut log_target: F,
    scales: &[f64],
    rng: &mut R,
) -> Result<MhStep>
where
    F: FnMut(&ParameterVector) -> f64,
    R: Rng + ?Sized,
{
    check_scales(current, scales)?;
    if current_log_target.is_nan() {
        return Err(Error::NanTarget {
            state: format!("{current:?}"),
        });
    }
    let proposal = random_walk_proposal(current, scales, 1.0, rng);
    let lt = log_target(&proposal);
    if lt.is_nan() {
        return Err(Error::NanTarget {
            state: format!("{proposal:?}"),
        });
    }
    let log_ratio = if lt == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if current_log_target == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        lt - current_log_target
    };
    if metropolis_accept(log_ratio, rng) {
        Ok(MhStep {
            next: proposal,
            log_target: lt,
            accepted: true,
        })
    } else {
        Ok(MhStep {
            next: current.clone(),
            log_target: current_log_target,
            accepted: false,
        })
    }
}

/// Runs `n_steps` random-walk Metropolis steps from `initial`, recording
/// every `record_every`-th state.
pub fn sample_fixed_dim<F>(
    initial: &ParameterVector,
    mut log_target: F,
    scales: &[f64],
    n_steps: usize,
    record_every: usize,
    seed: u64,
) -> Result<ChainRecord<ParameterVector>>
where
    F: FnMut(&ParameterVector) -> f64,
{
    if record_every == 0 {
        return Err(Error::invalid("record_every must be positive"));
    }
    let mut rng = rng::from_seed(seed);
    let mut record = ChainRecord::new(seed);
    let mut state = initial.clone();
    let mut lt = log_target(&state);
    for step in 1..=n_steps {
        let s = mh_fixed_dim_step(&state, lt, &mut log_target, scales, &mut rng)?;
        record.count(s.accepted);
        state = s.next;
        lt = s.log_target;
        if step % record_every == 0 {
            record.push(step, state.clone(), lt, s.accepted, MoveKind::Walk, 1.0);
        }
    }
    Ok(record)
}
