use serde::{Deserialize, Serialize};

use super::energy::{sufficient_statistics, BisousModel, BisousParams, FilamentStats};
use super::geometry::{GalaxyCatalog, MarkedConfiguration};
use crate::error::Result;
use crate::gibbs::AnnealingSchedule;
use crate::samplers::{anneal, ChainRecord, MoveMix, PointMoves, PointProcessKernel};

/// Result of a detection run.
#[derive(Clone, Debug)]
pub struct Detection {
    /// Lowest-energy configuration visited.
    pub config: MarkedConfiguration,
    pub stats: FilamentStats,
    pub best_energy: f64,
    /// Annealing trace of recorded configurations.
    pub record: ChainRecord<MarkedConfiguration>,
    pub intensity: f64,
}

/// Serializable summary of a detected configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub stats: FilamentStats,
    pub best_energy: f64,
    pub acceptance_rate: f64,
    pub n_proposed: usize,
}

impl Detection {
    pub fn summary(&self) -> DetectionSummary {
        DetectionSummary {
            stats: self.stats,
            best_energy: self.best_energy,
            acceptance_rate: self.record.acceptance_rate(),
            n_proposed: self.record.n_proposed,
        }
    }
}

/// Anneal the segment process on `catalog` from the empty configuration.
pub fn detect(
    catalog: &GalaxyCatalog,
    params: &BisousParams,
    schedule: &AnnealingSchedule,
    mix: MoveMix,
    record_every: usize,
    seed: u64,
) -> Result<Detection> {
    let model = BisousModel::new(params.clone())?;
    let theta = params.theta()?;
    let intensity = params.intensity(catalog.window.volume());
    let kernel = PointProcessKernel {
        model: &model,
        theta: &theta,
        data: catalog,
        moves: PointMoves::new(mix, intensity)?,
    };
    let initial = model.empty_configuration(catalog.window);
    let out = anneal(&kernel, initial, schedule, record_every, seed)?;
    let stats = sufficient_statistics(
        &out.best,
        params.connection_distance(),
        params.alignment_deg.to_radians(),
    );
    Ok(Detection {
        config: out.best,
        stats,
        best_energy: out.best_energy,
        record: out.record,
        intensity,
    })
}
