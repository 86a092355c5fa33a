//! Three-piece distributions for perturbation samples: a scaled Beta center
//! with power-law (heavy) or Beta (light) tails, their fit, simulation and
//! the percentile coverage test used to judge a fit.

mod coverage;
mod distribution;
mod fit;
mod hill;
pub mod special;

pub use coverage::{
    build_coverage_map, percentile_coverage_test, CoverageCell, CoverageConfig, CoverageMap,
    CoverageResult, PerturbationSample,
};
pub use distribution::{simulate, ParetoTail, Regime, ScaledBeta, Tail, TailMixture};
pub use fit::{
    classify, fit_mixture, fit_mixture_detailed, fit_pareto_tail, fit_scaled_beta, fit_unit_beta,
    FitConfig, RegimeChoice, HEAVY_INDEX,
};
pub use hill::{default_k, tail_index, TailIndex};
