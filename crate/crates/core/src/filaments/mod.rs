//! Filament detection with a marked point process of interacting segments.
//!
//! A filamentary network is approximated by a configuration of short
//! cylinders ("segments"). Segments that touch end-to-end with similar
//! orientations are connected; the interaction energy rewards connections,
//! the data energy rewards segments lying on over-densities of the galaxy
//! catalog. The configuration minimising the total energy is found by
//! simulated annealing over birth, death and change moves.

mod detect;
mod energy;
mod geometry;
pub mod synthetic;

pub use detect::{detect, Detection, DetectionSummary};
pub use energy::{
    connectivity, data_energy, interaction_energy, segment_counts, sufficient_statistics,
    BisousModel, BisousParams, DataParams, FilamentStats, InteractionParams, THETA_NAMES,
};
pub use geometry::{GalaxyCatalog, MarkedConfiguration, Segment, Window};
