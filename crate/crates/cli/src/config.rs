use std::path::PathBuf;

use astrogibbs::filaments::{BisousParams, Window};
use astrogibbs::heavytail::{CoverageConfig, FitConfig};
use astrogibbs::io::DEFAULT_PERIHELION_DISTANCE;
use astrogibbs::orbit::{OrbitMcmc, PriorSpec};
use astrogibbs::{AnnealingSchedule, MoveMix};
use serde::{Deserialize, Serialize};

/// Everything a run depends on. Echoed verbatim into the manifest, so a
/// manifest is itself a runnable configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub pipeline: Pipeline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Pipeline {
    Filaments {
        catalog: PathBuf,
        settings: FilamentSettings,
    },
    Orbit {
        observations: PathBuf,
        prior: PriorSpec,
        mcmc: OrbitMcmc,
    },
    TailsFit {
        values: PathBuf,
        fit: FitConfig,
    },
    TailsValidate {
        values: PathBuf,
        /// Fixed model to test; fitted from the values when absent.
        model: Option<PathBuf>,
        settings: TailsSettings,
    },
    TailsMap {
        perturbations: PathBuf,
        settings: TailsSettings,
    },
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::Filaments { .. } => "filaments",
            Pipeline::Orbit { .. } => "orbit",
            Pipeline::TailsFit { .. } => "tails-fit",
            Pipeline::TailsValidate { .. } => "tails-validate",
            Pipeline::TailsMap { .. } => "tails-map",
        }
    }

    /// Input files with their role.
    pub fn inputs(&self) -> Vec<(&'static str, PathBuf)> {
        match self {
            Pipeline::Filaments { catalog, .. } => vec![("catalog", catalog.clone())],
            Pipeline::Orbit { observations, .. } => vec![("observations", observations.clone())],
            Pipeline::TailsFit { values, .. } => vec![("values", values.clone())],
            Pipeline::TailsValidate { values, model, .. } => {
                let mut v = vec![("values", values.clone())];
                if let Some(m) = model {
                    v.push(("model", m.clone()));
                }
                v
            }
            Pipeline::TailsMap { perturbations, .. } => {
                vec![("perturbations", perturbations.clone())]
            }
        }
    }
}

/// `--config` file of `filaments detect`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilamentSettings {
    pub model: BisousParams,
    /// Observation window; the padded bounding box of the catalog when absent.
    pub window: Option<Window>,
    pub schedule: AnnealingSchedule,
    pub moves: MoveMix,
    pub record_every: usize,
}

impl Default for FilamentSettings {
    fn default() -> Self {
        Self {
            model: BisousParams::default(),
            window: None,
            schedule: AnnealingSchedule {
                initial_temperature: 10.0,
                cooling_factor: 0.95,
                steps_per_level: 10_000,
                final_temperature: 0.01,
            },
            moves: MoveMix::default(),
            record_every: 1_000,
        }
    }
}

/// `--config` file of `tails validate` and `tails map`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailsSettings {
    pub fit: FitConfig,
    pub coverage: CoverageConfig,
    /// A.U.; attached to every map cell.
    pub perihelion_distance: f64,
}

impl Default for TailsSettings {
    fn default() -> Self {
        Self {
            fit: FitConfig::default(),
            coverage: CoverageConfig::default(),
            perihelion_distance: DEFAULT_PERIHELION_DISTANCE,
        }
    }
}
