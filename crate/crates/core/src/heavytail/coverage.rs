use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distribution::{simulate, Regime, TailMixture};
use super::fit::{fit_mixture_detailed, FitConfig};
use super::hill::TailIndex;
use super::special::{quantile_sorted, sorted};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoverageConfig {
    /// Number of simulated replicates.
    pub n_rep: usize,
    /// Percentiles tested, in `(0, 100)`.
    pub percentiles: Vec<f64>,
    /// Level of the per-percentile band.
    pub ci_level: f64,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        Self {
            n_rep: 100,
            percentiles: (1..=99).map(f64::from).collect(),
            ci_level: 0.95,
        }
    }
}

impl CoverageConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_rep < 2 {
            return Err(Error::invalid("n_rep must be at least 2"));
        }
        if self.percentiles.is_empty() {
            return Err(Error::invalid("percentile list is empty"));
        }
        if self.percentiles.iter().any(|p| !(*p > 0.0 && *p < 100.0)) {
            return Err(Error::invalid("percentiles must lie in (0, 100)"));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::invalid("ci_level must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    /// Share of data percentiles inside their band.
    pub fraction: f64,
    pub percentiles: Vec<f64>,
    pub observed: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

fn percentile_set(sorted_values: &[f64], percentiles: &[f64]) -> Vec<f64> {
    percentiles
        .iter()
        .map(|p| quantile_sorted(sorted_values, p / 100.0))
        .collect()
}

/// Simulates `n_rep` samples of the data's size from `mixture`, builds an
/// empirical band per percentile over the replicates and reports the share
/// of the data's percentiles inside their band.
pub fn percentile_coverage_test(
    values: &[f64],
    mixture: &TailMixture,
    cfg: &CoverageConfig,
    seed: u64,
) -> Result<CoverageResult> {
    cfg.validate()?;
    mixture.validate()?;
    if values.is_empty() {
        return Err(Error::invalid("no values to test"));
    }
    let observed = percentile_set(&sorted(values), &cfg.percentiles);
    let n = values.len();
    let reps: Vec<Vec<f64>> = (0..cfg.n_rep)
        .into_par_iter()
        .map(|r| {
            let mut g = rng::stream(seed, &format!("coverage/replicate/{r}"));
            percentile_set(&sorted(&simulate(mixture, n, &mut g)), &cfg.percentiles)
        })
        .collect();
    let tail = 0.5 * (1.0 - cfg.ci_level);
    let mut lower = Vec::with_capacity(observed.len());
    let mut upper = Vec::with_capacity(observed.len());
    let mut inside = 0usize;
    for (j, obs) in observed.iter().enumerate() {
        let col = sorted(&reps.iter().map(|r| r[j]).collect::<Vec<_>>());
        let (lo, hi) = (
            quantile_sorted(&col, tail),
            quantile_sorted(&col, 1.0 - tail),
        );
        if *obs >= lo && *obs <= hi {
            inside += 1;
        }
        lower.push(lo);
        upper.push(hi);
    }
    Ok(CoverageResult {
        fraction: inside as f64 / observed.len() as f64,
        percentiles: cfg.percentiles.clone(),
        observed,
        lower,
        upper,
    })
}

/// Perturbation magnitudes for one (inclination, perihelion argument) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSample {
    /// degrees, `[0, 180]`
    pub inclination: f64,
    /// degrees, `[0, 360)`
    pub perihelion_argument: f64,
    pub values: Vec<f64>,
    /// A.U.
    pub perihelion_distance: f64,
}

impl PerturbationSample {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("cell has no values"));
        }
        if !(0.0..=180.0).contains(&self.inclination) {
            return Err(Error::invalid("inclination must lie in [0, 180]"));
        }
        if !(0.0..360.0).contains(&self.perihelion_argument) {
            return Err(Error::invalid("perihelion argument must lie in [0, 360)"));
        }
        Ok(())
    }
}

/// Fit and test outcome for one cell; a failed cell keeps its error and no
/// coverage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageCell {
    pub inclination: f64,
    pub perihelion_argument: f64,
    pub n_values: usize,
    pub coverage: Option<f64>,
    pub regime: Option<Regime>,
    pub tail_index: Option<TailIndex>,
    pub mixture: Option<TailMixture>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageMap {
    /// Sorted by inclination, then perihelion argument.
    pub cells: Vec<CoverageCell>,
}

impl CoverageMap {
    /// Cells fitted in `regime`.
    pub fn panel(&self, regime: Regime) -> CoverageMap {
        CoverageMap {
            cells: self
                .cells
                .iter()
                .filter(|c| c.regime == Some(regime))
                .cloned()
                .collect(),
        }
    }

    pub fn missing(&self) -> impl Iterator<Item = &CoverageCell> {
        self.cells.iter().filter(|c| c.coverage.is_none())
    }
}

fn cell_seed(seed: u64, inclination: f64, argument: f64) -> u64 {
    rng::derive_seed(
        seed,
        &format!(
            "coverage/cell/{:016x}/{:016x}",
            inclination.to_bits(),
            argument.to_bits()
        ),
    )
}

fn run_cell(
    s: &PerturbationSample,
    fit: &FitConfig,
    test: &CoverageConfig,
    seed: u64,
) -> CoverageCell {
    let mut cell = CoverageCell {
        inclination: s.inclination,
        perihelion_argument: s.perihelion_argument,
        n_values: s.values.len(),
        coverage: None,
        regime: None,
        tail_index: None,
        mixture: None,
        error: None,
    };
    let outcome = s.validate().and_then(|_| {
        let (m, index) = fit_mixture_detailed(&s.values, fit)?;
        let r = percentile_coverage_test(&s.values, &m, test, seed)?;
        Ok((m, index, r.fraction))
    });
    match outcome {
        Ok((m, index, fraction)) => {
            cell.regime = Some(m.regime());
            cell.tail_index = index;
            cell.mixture = Some(m);
            cell.coverage = Some(fraction);
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

/// Fits and tests every cell in parallel. Each cell draws from a stream
/// derived from `seed` and its coordinates, so the map does not depend on
/// scheduling.
pub fn build_coverage_map(
    samples: &[PerturbationSample],
    fit: &FitConfig,
    test: &CoverageConfig,
    seed: u64,
) -> Result<CoverageMap> {
    if samples.is_empty() {
        return Err(Error::invalid("no perturbation samples"));
    }
    fit.validate()?;
    test.validate()?;
    let mut cells: Vec<CoverageCell> = samples
        .par_iter()
        .map(|s| {
            run_cell(
                s,
                fit,
                test,
                cell_seed(seed, s.inclination, s.perihelion_argument),
            )
        })
        .collect();
    cells.sort_by(|a, b| {
        a.inclination
            .total_cmp(&b.inclination)
            .then(a.perihelion_argument.total_cmp(&b.perihelion_argument))
    });
    Ok(CoverageMap { cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heavytail::{ParetoTail, ScaledBeta, Tail};

    fn uniform_mixture() -> TailMixture {
        TailMixture {
            center: ScaledBeta::new(1.0, 1.0, 0.0, 1.0).unwrap(),
            left: Tail::Pareto(ParetoTail::new(0.1, 2.0).unwrap()),
            right: Tail::Pareto(ParetoTail::new(0.1, 2.0).unwrap()),
            split_lo: 0.0,
            split_hi: 1.0,
            weights: [0.0, 1.0, 0.0],
        }
    }

    #[test]
    fn two_replicates_give_a_fraction() {
        let v: Vec<f64> = (0..200).map(|i| (i as f64 + 0.5) / 200.0).collect();
        let cfg = CoverageConfig {
            n_rep: 2,
            ..Default::default()
        };
        let r = percentile_coverage_test(&v, &uniform_mixture(), &cfg, 1).unwrap();
        assert!((0.0..=1.0).contains(&r.fraction));
        assert!(r.lower.iter().zip(&r.upper).all(|(l, u)| l <= u));
    }

    #[test]
    fn settings_are_checked() {
        let v = [0.5; 10];
        let m = uniform_mixture();
        let bad_rep = CoverageConfig {
            n_rep: 1,
            ..Default::default()
        };
        assert!(percentile_coverage_test(&v, &m, &bad_rep, 1).is_err());
        let bad_p = CoverageConfig {
            percentiles: vec![],
            ..Default::default()
        };
        assert!(percentile_coverage_test(&v, &m, &bad_p, 1).is_err());
        assert!(
            build_coverage_map(&[], &FitConfig::default(), &CoverageConfig::default(), 1).is_err()
        );
    }

    #[test]
    fn failed_cells_are_kept_as_missing() {
        let bad = PerturbationSample {
            inclination: 10.0,
            perihelion_argument: 20.0,
            values: vec![1.0; 150],
            perihelion_distance: 5.1,
        };
        let map = build_coverage_map(&[bad], &FitConfig::default(), &CoverageConfig::default(), 1)
            .unwrap();
        assert_eq!(map.cells.len(), 1);
        assert_eq!(map.missing().count(), 1);
        assert!(map.cells[0].error.is_some());
    }
}
