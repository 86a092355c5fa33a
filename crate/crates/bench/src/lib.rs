//! Fixed inputs for the benchmarks.

use astrogibbs::filaments::synthetic::{planted_line, uniform_points};
use astrogibbs::filaments::{GalaxyCatalog, MarkedConfiguration, Segment, Window};
use astrogibbs::heavytail::{ParetoTail, ScaledBeta, Tail, TailMixture};
use astrogibbs::orbit::{KeplerOrbit, Observation};
use astrogibbs::rng;

pub fn orbit() -> KeplerOrbit {
    KeplerOrbit {
        period: 56.5330,
        semi_major_axis: 4936.0,
        eccentricity: 0.4958,
        inclination: 46.883,
        ascending_node: 75.125,
        arg_periapsis: 43.152,
        time_periapsis: 54314.26,
    }
}

/// Noise-free positions at `n` epochs over 120 days.
pub fn observations(n: usize) -> Vec<Observation> {
    let o = orbit();
    (0..n)
        .map(|k| {
            let epoch = 54300.0 + 120.0 * k as f64 / (n - 1) as f64;
            let (delta_x, delta_y) = o.propagate(epoch).unwrap();
            Observation {
                epoch,
                delta_x,
                delta_y,
                sigma: 5.0,
            }
        })
        .collect()
}

pub fn window() -> Window {
    Window::new([0.0; 3], [30.0; 3]).unwrap()
}

/// One planted line over uniform noise, `n_noise` points of it.
pub fn catalog(n_noise: usize) -> GalaxyCatalog {
    let w = window();
    let mut r = rng::from_seed(11);
    let mut pts =
        planted_line(&w, [5.0, 15.0, 15.0], [25.0, 15.0, 15.0], 100, 0.1, &mut r).unwrap();
    pts.extend(uniform_points(&w, n_noise, &mut r));
    GalaxyCatalog::new(pts, w).unwrap()
}

/// `n` segments laid out in rows of four, each row a connected chain along x.
pub fn chain(n: usize) -> MarkedConfiguration {
    let segs = (0..n)
        .map(|k| {
            let row = k / 4;
            let center = [
                3.0 + 6.0 * (k % 4) as f64,
                2.0 + 4.0 * (row % 7) as f64,
                2.0 + 4.0 * (row / 7) as f64,
            ];
            Segment::new(center, [1.0, 0.0, 0.0], 3.0, 0.3).unwrap()
        })
        .collect();
    MarkedConfiguration::new(window(), segs).unwrap()
}

pub fn heavy_mixture() -> TailMixture {
    TailMixture {
        center: ScaledBeta::new(2.0, 2.0, -1.0, 1.0).unwrap(),
        left: Tail::Pareto(ParetoTail::new(1.0, 1.5).unwrap()),
        right: Tail::Pareto(ParetoTail::new(1.0, 1.5).unwrap()),
        split_lo: -1.0,
        split_hi: 1.0,
        weights: [0.05, 0.9, 0.05],
    }
}

pub fn light_mixture() -> TailMixture {
    TailMixture {
        center: ScaledBeta::new(2.5, 1.5, 0.0, 4.0).unwrap(),
        left: Tail::Beta(ScaledBeta::new(3.0, 1.0, -1.0, 0.0).unwrap()),
        right: Tail::Beta(ScaledBeta::new(1.0, 2.0, 4.0, 6.0).unwrap()),
        split_lo: 0.0,
        split_hi: 4.0,
        weights: [0.05, 0.9, 0.05],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use astrogibbs::filaments::{interaction_energy, sufficient_statistics, InteractionParams};

    #[test]
    fn fixtures_are_valid() {
        let p = InteractionParams {
            rewards: [-1.0, 0.5, 1.5],
            hard_core: 3.0,
            connection_distance: 1.5,
            alignment: 20f64.to_radians(),
        };
        let c = chain(32);
        assert!(interaction_energy(&c, &p).is_finite());
        let s = sufficient_statistics(&c, 1.5, p.alignment);
        assert_eq!(
            (s.n_total, s.n_one_connected, s.n_two_connected),
            (32, 16, 16)
        );
        assert_eq!(observations(20).len(), 20);
        heavy_mixture().validate().unwrap();
        light_mixture().validate().unwrap();
        assert_eq!(catalog(200).len(), 300);
    }
}
