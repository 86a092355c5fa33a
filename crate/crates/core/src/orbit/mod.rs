//! Keplerian relative orbits of binary asteroids and their Bayesian
//! determination from sky-plane relative astrometry.

mod elements;
mod fit;
mod kepler;

pub use elements::{KeplerOrbit, ELEMENT_LABELS, ELEMENT_NAMES};
pub use fit::{
    fit_orbit, log_likelihood, predicted_positions, summarize, Observation, OrbitFit, OrbitMcmc,
    OrbitSummary, PriorBox, PriorSpec, SummaryRow,
};
pub use kepler::solve_kepler;

/// Sky-plane distance in km subtended by `arcsec` at `distance_au`.
///
/// Astrometry reported as angular offsets is converted with this at
/// ingestion time; the likelihood works in km.
pub fn arcsec_to_km(arcsec: f64, distance_au: f64) -> f64 {
    const AU_KM: f64 = 149_597_870.7;
    let rad = arcsec * std::f64::consts::PI / (180.0 * 3600.0);
    rad * distance_au * AU_KM
}
