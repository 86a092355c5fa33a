use std::path::{Path, PathBuf};

use astrogibbs::io::read_json;
use astrogibbs::orbit::{OrbitMcmc, PriorSpec};
use clap::{Args, Parser, Subcommand};

use crate::config::{FilamentSettings, Pipeline, RunConfig, TailsSettings};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "astrogibbs",
    version,
    about = "Gibbs-energy inference pipelines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filament detection in a galaxy catalog.
    Filaments {
        #[command(subcommand)]
        command: FilamentsCommand,
    },
    /// Relative orbits of binary asteroids.
    Orbit {
        #[command(subcommand)]
        command: OrbitCommand,
    },
    /// Heavy-tail mixture fits and coverage tests.
    Tails {
        #[command(subcommand)]
        command: TailsCommand,
    },
    /// Re-run a manifest and check that its outputs are reproduced.
    Replay {
        manifest: PathBuf,
        /// Write to this directory instead of the recorded one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Pipeline settings (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FilamentsCommand {
    /// Anneal the segment process to its lowest-energy configuration.
    Detect {
        /// CSV with columns x,y,z.
        #[arg(long)]
        catalog: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
pub enum OrbitCommand {
    /// Random-walk Metropolis over the seven orbital elements.
    Fit {
        /// CSV with columns epoch_rjd,dx_km,dy_km,sigma_km.
        #[arg(long)]
        obs: PathBuf,
        /// Prior box (JSON); missing intervals are derived from the data.
        #[arg(long)]
        prior: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long)]
        chains: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
pub enum TailsCommand {
    /// Fit the three-component mixture.
    Fit {
        /// CSV with a `value` column.
        #[arg(long)]
        values: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Percentile coverage test of a fitted or given mixture.
    Validate {
        #[arg(long)]
        values: PathBuf,
        /// Mixture JSON to test instead of fitting one.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        n_rep: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit and test every (inclination, perihelion argument) cell.
    Map {
        /// CSV with columns i_deg,w_deg,value.
        #[arg(long)]
        perturbations: PathBuf,
        #[arg(long)]
        n_rep: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn settings<T: Default + serde::de::DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    Ok(match path {
        Some(p) => read_json(p)?,
        None => T::default(),
    })
}

fn tails_settings(common: &Common, n_rep: Option<usize>) -> Result<TailsSettings> {
    let mut s: TailsSettings = settings(common.config.as_deref())?;
    if let Some(n) = n_rep {
        s.coverage.n_rep = n;
    }
    Ok(s)
}

fn run_config(common: &Common, pipeline: Pipeline) -> RunConfig {
    RunConfig {
        seed: common.seed,
        out: common.out.clone(),
        pipeline,
    }
}

/// What the invocation asks for.
pub enum Request {
    Run(Box<RunConfig>),
    Replay {
        manifest: PathBuf,
        out: Option<PathBuf>,
    },
}

impl Command {
    /// Resolve settings files and flag overrides into a run request.
    pub fn into_request(self) -> Result<Request> {
        let config = match self {
            Command::Replay { manifest, out } => return Ok(Request::Replay { manifest, out }),
            Command::Filaments {
                command: FilamentsCommand::Detect { catalog, common },
            } => {
                let settings: FilamentSettings = settings(common.config.as_deref())?;
                run_config(&common, Pipeline::Filaments { catalog, settings })
            }
            Command::Orbit {
                command:
                    OrbitCommand::Fit {
                        obs,
                        prior,
                        steps,
                        burn_in,
                        chains,
                        common,
                    },
            } => {
                let mut mcmc: OrbitMcmc = settings(common.config.as_deref())?;
                let prior: PriorSpec = settings(prior.as_deref())?;
                if let Some(n) = steps {
                    mcmc.n_steps = n;
                }
                if let Some(b) = burn_in {
                    mcmc.burn_in = b;
                }
                if let Some(c) = chains {
                    mcmc.n_chains = c;
                }
                run_config(
                    &common,
                    Pipeline::Orbit {
                        observations: obs,
                        prior,
                        mcmc,
                    },
                )
            }
            Command::Tails { command } => match command {
                TailsCommand::Fit { values, common } => {
                    let s = tails_settings(&common, None)?;
                    run_config(&common, Pipeline::TailsFit { values, fit: s.fit })
                }
                TailsCommand::Validate {
                    values,
                    model,
                    n_rep,
                    common,
                } => {
                    let settings = tails_settings(&common, n_rep)?;
                    run_config(
                        &common,
                        Pipeline::TailsValidate {
                            values,
                            model,
                            settings,
                        },
                    )
                }
                TailsCommand::Map {
                    perturbations,
                    n_rep,
                    common,
                } => {
                    let settings = tails_settings(&common, n_rep)?;
                    run_config(
                        &common,
                        Pipeline::TailsMap {
                            perturbations,
                            settings,
                        },
                    )
                }
            },
        };
        Ok(Request::Run(Box::new(config)))
    }
}
