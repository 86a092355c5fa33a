use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::elements::{KeplerOrbit, ELEMENT_LABELS, ELEMENT_NAMES};
use crate::error::{Error, Result};
use crate::gibbs::{AnnealingSchedule, ParamSpec, ParameterVector};
use crate::rng;
use crate::samplers::{anneal, mh_fixed_dim_step, ChainRecord, FixedDimKernel, MoveKind};

/// One relative-astrometry measurement in the sky plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// reduced Julian date
    pub epoch: f64,
    /// km
    pub delta_x: f64,
    /// km
    pub delta_y: f64,
    /// isotropic 1-σ uncertainty, km
    pub sigma: f64,
}

pub(crate) fn validate_observations(obs: &[Observation]) -> Result<()> {
    if obs.is_empty() {
        return Err(Error::invalid("no observations"));
    }
    for (i, o) in obs.iter().enumerate() {
        if !(o.sigma > 0.0) || !o.sigma.is_finite() {
            return Err(Error::invalid(format!(
                "observation {i}: sigma must be positive"
            )));
        }
        if ![o.epoch, o.delta_x, o.delta_y]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::invalid(format!("observation {i}: non-finite value")));
        }
        if i > 0 && !(o.epoch > obs[i - 1].epoch) {
            return Err(Error::invalid(format!(
                "observation {i}: epochs must be strictly increasing"
            )));
        }
    }
    Ok(())
}

/// Independent isotropic Gaussian residuals:
/// `-½ Σ |r_k|²/σ_k² - Σ log(2π σ_k²)`.
pub fn log_likelihood(orbit: &KeplerOrbit, observations: &[Observation]) -> Result<f64> {
    if observations.is_empty() {
        return Err(Error::invalid("no observations"));
    }
    let mut chi2 = 0.0;
    let mut norm = 0.0;
    for o in observations {
        let (px, py) = orbit.propagate(o.epoch)?;
        let s2 = o.sigma * o.sigma;
        chi2 += ((o.delta_x - px).powi(2) + (o.delta_y - py).powi(2)) / s2;
        norm += (2.0 * PI * s2).ln();
    }
    Ok(-0.5 * chi2 - norm)
}

/// Uniform prior: one closed interval per element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorBox {
    pub period: [f64; 2],
    pub semi_major_axis: [f64; 2],
    pub eccentricity: [f64; 2],
    pub inclination: [f64; 2],
    pub ascending_node: [f64; 2],
    pub arg_periapsis: [f64; 2],
    pub time_periapsis: [f64; 2],
}

impl PriorBox {
    pub fn intervals(&self) -> [[f64; 2]; 7] {
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

    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in ELEMENT_NAMES.iter().zip(self.intervals()) {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid(format!(
                    "prior interval for {name} must satisfy lower < upper"
                )));
            }
        }
        let [p0, _] = self.period;
        let [a0, _] = self.semi_major_axis;
        let [e0, e1] = self.eccentricity;
        if p0 <= 0.0 || a0 <= 0.0 {
            return Err(Error::invalid(
                "period and semi-major axis bounds must be positive",
            ));
        }
        if e0 < 0.0 || e1 >= 1.0 {
            return Err(Error::invalid("eccentricity bounds must lie in [0, 1)"));
        }
        let [i0, i1] = self.inclination;
        if i0 < 0.0 || i1 > 180.0 {
            return Err(Error::invalid("inclination bounds must lie in [0, 180]"));
        }
        Ok(())
    }

    /// Sampling specs. Node and argument of periapsis wrap around when their
    /// interval covers the full circle; every other element reflects.
    pub fn specs(&self) -> Vec<ParamSpec> {
        ELEMENT_NAMES
            .iter()
            .zip(self.intervals())
            .enumerate()
            .map(|(k, (name, [lo, hi]))| {
                if (k == 4 || k == 5) && hi - lo >= 360.0 {
                    ParamSpec::periodic(*name, lo, lo + 360.0)
                } else {
                    ParamSpec::new(*name, lo, hi)
                }
            })
            .collect()
    }

    pub fn contains(&self, orbit: &KeplerOrbit) -> bool {
        self.specs()
            .iter()
            .zip(orbit.to_array())
            .all(|(s, v)| s.contains(v))
    }

    pub fn center(&self) -> KeplerOrbit {
        let v: Vec<f64> = self
            .intervals()
            .iter()
            .map(|[a, b]| 0.5 * (a + b))
            .collect();
        KeplerOrbit::from_slice(&v)
    }
}

/// Prior box as configured: each interval either given or derived from the
/// observations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PriorSpec {
    pub period: Option<[f64; 2]>,
    pub semi_major_axis: Option<[f64; 2]>,
    pub eccentricity: Option<[f64; 2]>,
    pub inclination: Option<[f64; 2]>,
    pub ascending_node: Option<[f64; 2]>,
    pub arg_periapsis: Option<[f64; 2]>,
    pub time_periapsis: Option<[f64; 2]>,
}

impl PriorSpec {
    /// Fill the missing intervals.
    ///
    /// Angles and eccentricity take their widest admissible ranges. The
    /// semi-major axis spans `[r_max / 2, 10 r_max]` with `r_max` the largest
    /// observed separation, the period `[2 min Δt, 2 × time span]`, and the
    /// time of periapsis one maximal period centred on the first epoch.
    pub fn resolve(&self, observations: &[Observation]) -> Result<PriorBox> {
        validate_observations(observations)?;
        let r_max = observations
            .iter()
            .map(|o| o.delta_x.hypot(o.delta_y))
            .fold(0.0, f64::max);
        let first = observations[0].epoch;
        let span = observations.last().unwrap().epoch - first;
        let min_gap = observations
            .windows(2)
            .map(|w| w[1].epoch - w[0].epoch)
            .fold(f64::INFINITY, f64::min);

        let need = |v: Option<[f64; 2]>, what: &str, auto: Option<[f64; 2]>| {
            v.or(auto).ok_or_else(|| {
                Error::invalid(format!(
                    "cannot derive a prior interval for {what} from the data"
                ))
            })
        };
        let period = need(
            self.period,
            "period",
            (span > 0.0).then_some([2.0 * min_gap, 2.0 * span]),
        )?;
        let semi_major_axis = need(
            self.semi_major_axis,
            "semi-major axis",
            (r_max > 0.0).then_some([0.5 * r_max, 10.0 * r_max]),
        )?;
        let prior = PriorBox {
            period,
            semi_major_axis,
            eccentricity: self.eccentricity.unwrap_or([0.0, 0.99]),
            inclination: self.inclination.unwrap_or([0.0, 180.0]),
            ascending_node: self.ascending_node.unwrap_or([0.0, 360.0]),
            arg_periapsis: self.arg_periapsis.unwrap_or([0.0, 360.0]),
            time_periapsis: self
                .time_periapsis
                .unwrap_or([first - 0.5 * period[1], first + 0.5 * period[1]]),
        };
        prior.validate()?;
        Ok(prior)
    }
}

/// MCMC settings for [`fit_orbit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrbitMcmc {
    pub n_steps: usize,
    pub burn_in: usize,
    /// Random-walk scales in element units; derived from the curvature of
    /// the log-likelihood at the starting orbit when absent.
    pub scales: Option<[f64; 7]>,
    /// Starting orbit; found by simulated annealing over the prior box when
    /// absent.
    pub initial: Option<KeplerOrbit>,
    pub n_chains: usize,
    pub record_every: usize,
    /// Length of each temperature level of the start-finding anneal.
    pub anneal_steps_per_level: usize,
    /// Number of independent anneals; the best end point wins.
    pub anneal_restarts: usize,
}

impl Default for OrbitMcmc {
    fn default() -> Self {
        Self {
            n_steps: 200_000,
            burn_in: 20_000,
            scales: None,
            initial: None,
            n_chains: 1,
            record_every: 1,
            anneal_steps_per_level: 500,
            anneal_restarts: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub parameter: String,
    pub label: String,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

/// Min / median / mean / max per parameter, in table row order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub columns: [String; 4],
    pub rows: Vec<SummaryRow>,
    pub n_samples: usize,
}

impl OrbitSummary {
    pub fn row(&self, parameter: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.parameter == parameter)
    }

    /// Orbit made of the per-parameter posterior means.
    pub fn mean_orbit(&self) -> Option<KeplerOrbit> {
        if self.rows.len() < 7 {
            return None;
        }
        let v: Vec<f64> = ELEMENT_NAMES
            .iter()
            .map(|n| self.row(n).map(|r| r.mean))
            .collect::<Option<_>>()?;
        Some(KeplerOrbit::from_slice(&v))
    }
}

/// Order statistics and mean of each coordinate over `samples`. The median
/// of an even count is the midpoint of the central pair.
pub fn summarize(names: &[&str], labels: &[&str], samples: &[&[f64]]) -> Result<OrbitSummary> {
    if samples.is_empty() {
        return Err(Error::invalid("cannot summarize an empty sample set"));
    }
    if names.len() != labels.len() || samples.iter().any(|s| s.len() != names.len()) {
        return Err(Error::invalid(
            "sample width does not match parameter count",
        ));
    }
    let n = samples.len();
    let rows = (0..names.len())
        .map(|k| {
            let mut col: Vec<f64> = samples.iter().map(|s| s[k]).collect();
            col.sort_by(f64::total_cmp);
            let median = if n % 2 == 1 {
                col[n / 2]
            } else {
                0.5 * (col[n / 2 - 1] + col[n / 2])
            };
            // mean of a constant column must equal the constant exactly
            let mean = if col[0] == col[n - 1] {
                col[0]
            } else {
                (col.iter().sum::<f64>() / n as f64).clamp(col[0], col[n - 1])
            };
            SummaryRow {
                parameter: names[k].to_string(),
                label: labels[k].to_string(),
                min: col[0],
                median,
                mean,
                max: col[n - 1],
            }
        })
        .collect();
    Ok(OrbitSummary {
        columns: ["Min.", "Median", "Mean", "Max."].map(String::from),
        rows,
        n_samples: n,
    })
}

#[derive(Clone, Debug)]
pub struct OrbitFit {
    pub summary: OrbitSummary,
    /// Summary of the implied system mass (kg) over the same samples.
    pub mass_summary: SummaryRow,
    pub initial: KeplerOrbit,
    pub scales: [f64; 7],
    pub chains: Vec<ChainRecord<ParameterVector>>,
    /// Post-burn-in acceptance rate per chain.
    pub acceptance: Vec<f64>,
}

impl OrbitFit {
    pub fn posterior_samples(&self, burn_in: usize) -> impl Iterator<Item = &ParameterVector> {
        self.chains.iter().flat_map(move |c| {
            c.steps
                .iter()
                .zip(&c.states)
                .filter(move |(s, _)| **s > burn_in)
                .map(|(_, p)| p)
        })
    }
}

fn log_posterior(values: &[f64], observations: &[Observation]) -> f64 {
    let orbit = KeplerOrbit::from_slice(values);
    // the box is enforced by the parameter bounds; outside it the density is 0
    log_likelihood(&orbit, observations).unwrap_or(f64::NEG_INFINITY)
}

/// Step sizes from the diagonal curvature of the log-likelihood at
/// `center`: `0.5 / sqrt(-∂²ℓ/∂θ_k²)`, capped at a tenth of the prior width.
fn curvature_scales(center: &ParameterVector, observations: &[Observation]) -> [f64; 7] {
    let base = center.values().to_vec();
    let f0 = log_posterior(&base, observations);
    let mut out = [0.0; 7];
    for k in 0..7 {
        let spec = &center.specs()[k];
        let cap = 0.1 * spec.width();
        let mut h = 1e-6 * spec.width().max(1e-12);
        let mut scale = cap;
        // grow the difference step until the curvature is resolved
        for _ in 0..12 {
            let mut up = base.clone();
            let mut dn = base.clone();
            up[k] += h;
            dn[k] -= h;
            let c = -(log_posterior(&up, observations) - 2.0 * f0
                + log_posterior(&dn, observations))
                / (h * h);
            if c.is_finite() && c > 0.0 && (c * h * h) > 1e-6 {
                scale = (0.5 / c.sqrt()).min(cap);
                break;
            }
            h *= 4.0;
        }
        out[k] = scale;
    }
    out
}

fn find_start(
    observations: &[Observation],
    prior: &PriorBox,
    cfg: &OrbitMcmc,
    seed: u64,
) -> Result<ParameterVector> {
    let specs = prior.specs();
    let widths: Vec<f64> = specs.iter().map(ParamSpec::width).collect();
    let center = ParameterVector::new(specs.clone(), prior.center().to_array().to_vec())?;
    let energy = |p: &ParameterVector| -log_posterior(p.values(), observations);
    let e0 = energy(&center);
    let t0 = (e0.abs() / 10.0).max(10.0);
    let schedule = AnnealingSchedule::new(t0, 0.9, cfg.anneal_steps_per_level.max(1), 0.5)?;
    let kernel = FixedDimKernel::new(energy, widths.iter().map(|w| w / 6.0).collect())
        .temperature_scaled(t0);

    let restarts = cfg.anneal_restarts.max(1);
    let results: Vec<Result<(f64, ParameterVector)>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let out = anneal(
                &kernel,
                center.clone(),
                &schedule,
                usize::MAX,
                rng::derive_seed(seed, &format!("orbit/anneal/{r}")),
            )?;
            Ok((out.best_energy, out.best))
        })
        .collect();
    let mut best: Option<(f64, ParameterVector)> = None;
    for r in results {
        let (e, p) = r?;
        if best.as_ref().is_none_or(|(be, _)| e < *be) {
            best = Some((e, p));
        }
    }
    Ok(best.expect("at least one restart").1)
}

/// Random-walk Metropolis over the seven elements with a uniform prior on
/// `prior` and the Gaussian likelihood of [`log_likelihood`].
///
/// Chains are seeded from named sub-streams of `seed` and run in parallel;
/// the summary pools post-burn-in samples of all chains.
pub fn fit_orbit(
    observations: &[Observation],
    prior: &PriorBox,
    cfg: &OrbitMcmc,
    seed: u64,
) -> Result<OrbitFit> {
    validate_observations(observations)?;
    prior.validate()?;
    if cfg.n_steps <= cfg.burn_in {
        return Err(Error::invalid("n_steps must exceed burn_in"));
    }
    if cfg.n_chains == 0 || cfg.record_every == 0 {
        return Err(Error::invalid("n_chains and record_every must be positive"));
    }
    let specs = prior.specs();

    let start = match &cfg.initial {
        Some(o) => {
            o.validate()?;
            let v = o.normalized().to_array().to_vec();
            if !prior.contains(&KeplerOrbit::from_slice(&v)) {
                return Err(Error::invalid("initial orbit lies outside the prior box"));
            }
            ParameterVector::new(specs, v)?
        }
        None => find_start(observations, prior, cfg, seed)?,
    };
    if !log_posterior(start.values(), observations).is_finite() {
        return Err(Error::invalid(
            "likelihood is not finite at the starting orbit",
        ));
    }
    let scales = match cfg.scales {
        Some(s) => s,
        None => curvature_scales(&start, observations),
    };

    let runs: Vec<Result<(ChainRecord<ParameterVector>, f64)>> = (0..cfg.n_chains)
        .into_par_iter()
        .map(|c| {
            run_chain(
                &start,
                observations,
                &scales,
                cfg,
                rng::derive_seed(seed, &format!("orbit/chain/{c}")),
            )
        })
        .collect();
    let mut chains = Vec::with_capacity(runs.len());
    let mut acceptance = Vec::with_capacity(runs.len());
    for r in runs {
        let (rec, acc) = r?;
        chains.push(rec);
        acceptance.push(acc);
    }

    let samples: Vec<&[f64]> = chains
        .iter()
        .flat_map(|c| {
            c.steps
                .iter()
                .zip(&c.states)
                .filter(|(s, _)| **s > cfg.burn_in)
                .map(|(_, p)| p.values())
        })
        .collect();
    let summary = summarize(&ELEMENT_NAMES, &ELEMENT_LABELS, &samples)?;
    let masses: Vec<[f64; 1]> = samples
        .iter()
        .map(|v| [KeplerOrbit::from_slice(v).system_mass_kg()])
        .collect();
    let mass_refs: Vec<&[f64]> = masses.iter().map(|m| m.as_slice()).collect();
    let mass_summary = summarize(&["system_mass"], &["System mass, kg"], &mass_refs)?
        .rows
        .remove(0);

    Ok(OrbitFit {
        summary,
        mass_summary,
        initial: KeplerOrbit::from_slice(start.values()),
        scales,
        chains,
        acceptance,
    })
}

fn run_chain(
    start: &ParameterVector,
    observations: &[Observation],
    scales: &[f64; 7],
    cfg: &OrbitMcmc,
    seed: u64,
) -> Result<(ChainRecord<ParameterVector>, f64)> {
    let mut rng = rng::from_seed(seed);
    let mut record = ChainRecord::new(seed);
    let target = |p: &ParameterVector| log_posterior(p.values(), observations);
    let mut state = start.clone();
    let mut lt = target(&state);
    let mut post_accepted = 0usize;
    let mut any_move = scales.iter().any(|s| *s > 0.0);
    for step in 1..=cfg.n_steps {
        let s = mh_fixed_dim_step(&state, lt, target, scales, &mut rng)?;
        record.count(s.accepted);
        if step > cfg.burn_in && s.accepted {
            post_accepted += 1;
        }
        state = s.next;
        lt = s.log_target;
        if step % cfg.record_every == 0 {
            record.push(step, state.clone(), lt, s.accepted, MoveKind::Walk, 1.0);
        }
    }
    let post = cfg.n_steps - cfg.burn_in;
    // an all-zero scale vector is a deliberate frozen chain, not a failure
    any_move &= post_accepted == 0;
    if any_move {
        return Err(Error::AllRejected { steps: post });
    }
    Ok((record, post_accepted as f64 / post as f64))
}

/// Positions predicted by `orbit` at each observation epoch.
pub fn predicted_positions(
    orbit: &KeplerOrbit,
    observations: &[Observation],
) -> Result<Vec<(f64, f64)>> {
    observations
        .iter()
        .map(|o| orbit.propagate(o.epoch))
        .collect()
}
