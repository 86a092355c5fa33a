//! Gibbs-energy posteriors with MCMC and simulated annealing, and three
//! inference pipelines built on them:
//!
//! * [`filaments`]: segment marked point process for filament detection in
//!   galaxy catalogs;
//! * [`heavytail`]: three-component (scaled Beta + Pareto/Beta tails) fits
//!   and their simulation-based percentile coverage test;
//! * [`orbit`]: Keplerian relative-orbit fitting for binary asteroids.

// `!(x > 0.0)` is the NaN-rejecting form used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod filaments;
pub mod gibbs;
pub mod heavytail;
pub mod io;
pub mod orbit;
pub mod rng;
pub mod samplers;

pub use error::{Error, Result};
pub use gibbs::{
    annealing_target, total_energy, AnnealingSchedule, Boundary, EnergyModel, ParamSpec,
    ParameterVector,
};
pub use samplers::{ChainRecord, MoveKind, MoveMix};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
