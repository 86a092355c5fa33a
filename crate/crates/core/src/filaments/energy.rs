use serde::{Deserialize, Serialize};

use super::geometry::{dot, norm2, sub, GalaxyCatalog, MarkLaw, MarkedConfiguration, Segment};
use crate::error::{Error, Result};
use crate::gibbs::{EnergyModel, ParamSpec, ParameterVector};

/// Names of the model parameters, in the order of [`BisousParams::theta`].
pub const THETA_NAMES: [&str; 9] = [
    "w0",
    "w1",
    "w2",
    "hard_core",
    "connection_distance",
    "alignment",
    "min_count",
    "contrast",
    "penalty",
];

/// Counts of segments by number of connected extremities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilamentStats {
    pub n_total: usize,
    pub n_one_connected: usize,
    pub n_two_connected: usize,
}

/// Model constants. Lengths are in catalog units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BisousParams {
    /// Range of segment half-lengths; equal bounds fix the length.
    pub half_length: [f64; 2],
    /// Radius of the counting cylinder, fixed for a run.
    pub radius: f64,
    /// Endpoint distance below which two segments may connect
    /// (default: half the mean half-length).
    pub connection_distance: Option<f64>,
    /// Maximal axis angle of a connection, degrees.
    pub alignment_deg: f64,
    /// Minimal distance between segment centers
    /// (default: half the mean half-length).
    pub hard_core: Option<f64>,
    /// Rewards `(w0, w1, w2)` for segments with 0, 1, 2 connected ends.
    pub rewards: [f64; 3],
    /// Minimal galaxy count inside a cylinder (μ).
    pub min_count: f64,
    /// Required contrast κ of the cylinder over its surrounding shell.
    pub contrast: f64,
    /// Energy added to a segment that is not an over-density.
    pub penalty: f64,
    /// Intensity λ of the reference Poisson process
    /// (default: 10 segments expected in the window).
    pub intensity: Option<f64>,
    /// Change-move proposal scales (defaults: half-length / 4, 0.1 rad,
    /// tenth of the half-length range).
    pub center_sd: Option<f64>,
    pub angle_sd: Option<f64>,
    pub length_sd: Option<f64>,
}

impl Default for BisousParams {
    fn default() -> Self {
        Self {
            half_length: [2.0, 2.0],
            radius: 0.5,
            connection_distance: None,
            alignment_deg: 30.0,
            hard_core: None,
            rewards: [-1.0, 0.5, 1.5],
            min_count: 3.0,
            contrast: 1.5,
            penalty: 5.0,
            intensity: None,
            center_sd: None,
            angle_sd: None,
            length_sd: None,
        }
    }
}

impl BisousParams {
    fn mean_half_length(&self) -> f64 {
        0.5 * (self.half_length[0] + self.half_length[1])
    }

    pub fn connection_distance(&self) -> f64 {
        self.connection_distance
            .unwrap_or(0.5 * self.mean_half_length())
    }

    pub fn hard_core(&self) -> f64 {
        self.hard_core.unwrap_or(0.5 * self.mean_half_length())
    }

    pub fn intensity(&self, volume: f64) -> f64 {
        self.intensity.unwrap_or(10.0 / volume)
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.half_length;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::invalid(
                "half-length range must satisfy 0 < min <= max",
            ));
        }
        if !(self.radius > 0.0) {
            return Err(Error::invalid("radius must be positive"));
        }
        if !(self.connection_distance() > 0.0) {
            return Err(Error::invalid("connection distance must be positive"));
        }
        if !(self.hard_core() >= 0.0) {
            return Err(Error::invalid("hard-core distance must be nonnegative"));
        }
        if !(self.alignment_deg > 0.0 && self.alignment_deg <= 90.0) {
            return Err(Error::invalid(
                "alignment tolerance must lie in (0, 90] degrees",
            ));
        }
        if !(self.contrast > 0.0) {
            return Err(Error::invalid("contrast factor must be positive"));
        }
        if !(self.min_count >= 0.0) || !(self.penalty >= 0.0) {
            return Err(Error::invalid("min_count and penalty must be nonnegative"));
        }
        if self.rewards.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("rewards must be finite"));
        }
        if let Some(l) = self.intensity {
            if !(l > 0.0) {
                return Err(Error::invalid("intensity must be positive"));
            }
        }
        Ok(())
    }

    /// Parameter vector `θ` laid out as [`THETA_NAMES`].
    pub fn theta(&self) -> Result<ParameterVector> {
        self.validate()?;
        let big = 1e12;
        let specs = vec![
            ParamSpec::new("w0", -big, big),
            ParamSpec::new("w1", -big, big),
            ParamSpec::new("w2", -big, big),
            ParamSpec::new("hard_core", 0.0, big),
            ParamSpec::new("connection_distance", 0.0, big),
            ParamSpec::new("alignment", 0.0, std::f64::consts::FRAC_PI_2),
            ParamSpec::new("min_count", 0.0, big),
            ParamSpec::new("contrast", 0.0, big),
            ParamSpec::new("penalty", 0.0, big),
        ];
        ParameterVector::new(
            specs,
            vec![
                self.rewards[0],
                self.rewards[1],
                self.rewards[2],
                self.hard_core(),
                self.connection_distance(),
                self.alignment_deg.to_radians(),
                self.min_count,
                self.contrast,
                self.penalty,
            ],
        )
    }

    pub(crate) fn mark_law(&self) -> MarkLaw {
        let [lo, hi] = self.half_length;
        MarkLaw {
            half_length: self.half_length,
            radius: self.radius,
            center_sd: self.center_sd.unwrap_or(0.25 * self.mean_half_length()),
            angle_sd: self.angle_sd.unwrap_or(0.1),
            length_sd: self.length_sd.unwrap_or(0.1 * (hi - lo)),
        }
    }
}

/// Interaction parameters read from `θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionParams {
    pub rewards: [f64; 3],
    pub hard_core: f64,
    pub connection_distance: f64,
    pub alignment: f64,
}

impl InteractionParams {
    pub fn from_theta(theta: &ParameterVector) -> Self {
        let g = |n: &str| theta.get(n).unwrap_or(f64::NAN);
        Self {
            rewards: [g("w0"), g("w1"), g("w2")],
            hard_core: g("hard_core"),
            connection_distance: g("connection_distance"),
            alignment: g("alignment"),
        }
    }
}

/// Data parameters read from `θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataParams {
    pub min_count: f64,
    pub contrast: f64,
    pub penalty: f64,
}

impl DataParams {
    pub fn from_theta(theta: &ParameterVector) -> Self {
        let g = |n: &str| theta.get(n).unwrap_or(f64::NAN);
        Self {
            min_count: g("min_count"),
            contrast: g("contrast"),
            penalty: g("penalty"),
        }
    }
}

/// Endpoint pairs `(i, end_i, j, end_j)` closer than `eps`.
fn close_endpoint_pairs(
    config: &MarkedConfiguration,
    eps: f64,
) -> Vec<(usize, usize, usize, usize)> {
    let ends: Vec<_> = config.segments.iter().map(Segment::endpoints).collect();
    let eps2 = eps * eps;
    let mut out = Vec::new();
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            for a in 0..2 {
                for b in 0..2 {
                    if norm2(sub(ends[i][a], ends[j][b])) < eps2 {
                        out.push((i, a, j, b));
                    }
                }
            }
        }
    }
    out
}

/// Number of connected extremities (0, 1 or 2) of every segment.
///
/// Segments `a` and `b` are connected through the endpoint pair
/// `(e_a, e_b)` when the endpoints are closer than `eps` and the undirected
/// axes differ by less than `tau` radians.
pub fn connectivity(config: &MarkedConfiguration, eps: f64, tau: f64) -> Vec<u8> {
    let n = config.segments.len();
    let mut ends = vec![[false; 2]; n];
    for (i, a, j, b) in close_endpoint_pairs(config, eps) {
        if config.segments[i].axis_angle(&config.segments[j]) < tau {
            ends[i][a] = true;
            ends[j][b] = true;
        }
    }
    ends.iter()
        .map(|e| u8::from(e[0]) + u8::from(e[1]))
        .collect()
}

pub fn sufficient_statistics(config: &MarkedConfiguration, eps: f64, tau: f64) -> FilamentStats {
    let counts = connectivity(config, eps, tau);
    FilamentStats {
        n_total: counts.len(),
        n_one_connected: counts.iter().filter(|&&c| c == 1).count(),
        n_two_connected: counts.iter().filter(|&&c| c == 2).count(),
    }
}

/// `-Σ w_{c(s)}` over segments, or `+inf` when two centers are closer than
/// the hard-core distance or two touching extremities belong to misaligned
/// segments.
pub fn interaction_energy(config: &MarkedConfiguration, p: &InteractionParams) -> f64 {
    let segs = &config.segments;
    let h2 = p.hard_core * p.hard_core;
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            if norm2(sub(segs[i].center, segs[j].center)) < h2 {
                return f64::INFINITY;
            }
        }
    }
    let mut ends = vec![[false; 2]; segs.len()];
    for (i, a, j, b) in close_endpoint_pairs(config, p.connection_distance) {
        if segs[i].axis_angle(&segs[j]) >= p.alignment {
            return f64::INFINITY;
        }
        ends[i][a] = true;
        ends[j][b] = true;
    }
    -ends
        .iter()
        .map(|e| p.rewards[usize::from(e[0]) + usize::from(e[1])])
        .sum::<f64>()
}

/// Galaxies inside the segment's cylinder and inside the concentric
/// cylinder of twice the radius (which includes the inner one).
pub fn segment_counts(segment: &Segment, catalog: &GalaxyCatalog) -> (usize, usize) {
    let d = segment.direction();
    let c = segment.center;
    let h = segment.half_length;
    let r2 = segment.radius * segment.radius;
    let outer2 = 4.0 * r2;
    let reach = h + 2.0 * segment.radius;
    let mut n_in = 0;
    let mut n_shell = 0;
    for p in &catalog.positions {
        if (p[0] - c[0]).abs() > reach || (p[1] - c[1]).abs() > reach || (p[2] - c[2]).abs() > reach
        {
            continue;
        }
        let v = sub(*p, c);
        let t = dot(v, d);
        if t.abs() > h {
            continue;
        }
        let perp2 = (norm2(v) - t * t).max(0.0);
        if perp2 <= outer2 {
            n_shell += 1;
            if perp2 <= r2 {
                n_in += 1;
            }
        }
    }
    (n_in, n_shell)
}

/// Per segment `-ln(1 + n_in)`, plus `penalty` when the cylinder holds fewer
/// than `min_count` galaxies or is not denser than `contrast` times the
/// surrounding shell.
pub fn data_energy(config: &MarkedConfiguration, catalog: &GalaxyCatalog, p: &DataParams) -> f64 {
    config
        .segments
        .iter()
        .map(|s| {
            let (n_in, n_shell) = segment_counts(s, catalog);
            let n_in_f = n_in as f64;
            let outer = (n_shell - n_in) as f64;
            let sparse = n_in_f < p.min_count || n_in_f < p.contrast * outer;
            -(1.0 + n_in_f).ln() + if sparse { p.penalty } else { 0.0 }
        })
        .sum()
}

/// The segment process as a Gibbs model over [`MarkedConfiguration`]s.
#[derive(Clone, Debug)]
pub struct BisousModel {
    params: BisousParams,
}

impl BisousModel {
    pub fn new(params: BisousParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &BisousParams {
        &self.params
    }

    /// Empty configuration on `window`, ready for sampling.
    pub fn empty_configuration(&self, window: super::Window) -> MarkedConfiguration {
        MarkedConfiguration::empty(window).with_marks(self.params.mark_law())
    }
}

impl EnergyModel for BisousModel {
    type State = MarkedConfiguration;
    type Data = GalaxyCatalog;

    fn validate(&self, state: &MarkedConfiguration) -> Result<()> {
        state.validate()
    }

    fn interaction_energy(&self, state: &MarkedConfiguration, theta: &ParameterVector) -> f64 {
        interaction_energy(state, &InteractionParams::from_theta(theta))
    }

    fn data_energy(
        &self,
        state: &MarkedConfiguration,
        theta: &ParameterVector,
        data: &GalaxyCatalog,
    ) -> f64 {
        data_energy(state, data, &DataParams::from_theta(theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filaments::Window;
    use crate::gibbs::total_energy;

    fn window() -> Window {
        Window::new([-20.0; 3], [20.0; 3]).unwrap()
    }

    fn seg(cx: f64, dir: [f64; 3]) -> Segment {
        Segment::new([cx, 0.0, 0.0], dir, 1.0, 0.5).unwrap()
    }

    fn chain3() -> MarkedConfiguration {
        MarkedConfiguration::new(
            window(),
            vec![
                seg(0.0, [1.0, 0.0, 0.0]),
                seg(2.0, [1.0, 0.0, 0.0]),
                seg(4.0, [-1.0, 0.0, 0.0]),
            ],
        )
        .unwrap()
    }

    fn tau() -> f64 {
        30f64.to_radians()
    }

    #[test]
    fn single_segment_unconnected() {
        let c = MarkedConfiguration::new(window(), vec![seg(0.0, [1.0, 0.0, 0.0])]).unwrap();
        assert_eq!(connectivity(&c, 0.5, tau()), vec![0]);
    }

    #[test]
    fn touching_pair_and_chain() {
        let pair = MarkedConfiguration::new(
            window(),
            vec![seg(0.0, [1.0, 0.0, 0.0]), seg(2.0, [1.0, 0.0, 0.0])],
        )
        .unwrap();
        assert_eq!(connectivity(&pair, 0.5, tau()), vec![1, 1]);
        assert_eq!(
            sufficient_statistics(&pair, 0.5, tau()),
            FilamentStats {
                n_total: 2,
                n_one_connected: 2,
                n_two_connected: 0
            }
        );
        assert_eq!(connectivity(&chain3(), 0.5, tau()), vec![1, 2, 1]);
        assert_eq!(
            sufficient_statistics(&chain3(), 0.5, tau()),
            FilamentStats {
                n_total: 3,
                n_one_connected: 2,
                n_two_connected: 1
            }
        );
        assert_eq!(
            sufficient_statistics(&MarkedConfiguration::empty(window()), 0.5, tau()),
            FilamentStats::default()
        );
    }

    #[test]
    fn misaligned_touch_does_not_connect() {
        let c = MarkedConfiguration::new(
            window(),
            vec![
                seg(0.0, [1.0, 0.0, 0.0]),
                Segment::new([1.0, 1.0, 0.0], [0.0, 1.0, 0.0], 1.0, 0.5).unwrap(),
            ],
        )
        .unwrap();
        // endpoints (1,0,0) and (1,0,0) coincide but axes are orthogonal
        assert_eq!(connectivity(&c, 0.5, tau()), vec![0, 0]);
        let p = InteractionParams {
            rewards: [-1.0, 0.5, 1.5],
            hard_core: 0.5,
            connection_distance: 0.5,
            alignment: tau(),
        };
        assert_eq!(interaction_energy(&c, &p), f64::INFINITY);
    }

    #[test]
    fn interaction_examples() {
        let p = InteractionParams {
            rewards: [-1.0, 0.5, 1.5],
            hard_core: 0.5,
            connection_distance: 0.5,
            alignment: tau(),
        };
        assert_eq!(
            interaction_energy(&MarkedConfiguration::empty(window()), &p),
            0.0
        );
        assert_eq!(interaction_energy(&chain3(), &p), -2.5);
        let close = MarkedConfiguration::new(
            window(),
            vec![seg(0.0, [1.0, 0.0, 0.0]), seg(0.3, [0.0, 1.0, 0.0])],
        )
        .unwrap();
        assert_eq!(interaction_energy(&close, &p), f64::INFINITY);
    }

    fn line_catalog(n: usize) -> GalaxyCatalog {
        // n points along the x axis inside a half-length-1 cylinder
        let pts = (0..n)
            .map(|k| [-0.95 + 1.9 * k as f64 / (n - 1) as f64, 0.0, 0.0])
            .collect();
        GalaxyCatalog::new(pts, window()).unwrap()
    }

    #[test]
    fn data_energy_examples() {
        let p = DataParams {
            min_count: 3.0,
            contrast: 1.0,
            penalty: 4.0,
        };
        let empty_cat = GalaxyCatalog::new(vec![], window()).unwrap();
        assert_eq!(
            data_energy(&MarkedConfiguration::empty(window()), &empty_cat, &p),
            0.0
        );
        let one = MarkedConfiguration::new(window(), vec![seg(0.0, [1.0, 0.0, 0.0])]).unwrap();
        assert_eq!(data_energy(&one, &empty_cat, &p), 4.0);
        let cat = line_catalog(20);
        assert_eq!(segment_counts(&one.segments[0], &cat), (20, 20));
        assert!((data_energy(&one, &cat, &p) + 21f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn shell_contrast_penalises() {
        let mut pts: Vec<[f64; 3]> = line_catalog(4).positions;
        // four points in the shell between r and 2r
        pts.extend([
            [0.0, 0.8, 0.0],
            [0.2, -0.8, 0.0],
            [0.4, 0.0, 0.9],
            [-0.3, 0.0, -0.9],
        ]);
        let cat = GalaxyCatalog::new(pts, window()).unwrap();
        let one = MarkedConfiguration::new(window(), vec![seg(0.0, [1.0, 0.0, 0.0])]).unwrap();
        assert_eq!(segment_counts(&one.segments[0], &cat), (4, 8));
        let p = DataParams {
            min_count: 1.0,
            contrast: 1.5,
            penalty: 2.0,
        };
        assert!((data_energy(&one, &cat, &p) - (2.0 - 5f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn model_total_energy() {
        let params = BisousParams {
            half_length: [1.0, 1.0],
            connection_distance: Some(0.5),
            hard_core: Some(0.5),
            ..Default::default()
        };
        let model = BisousModel::new(params.clone()).unwrap();
        let theta = params.theta().unwrap();
        let cat = GalaxyCatalog::new(vec![], window()).unwrap();
        let e = total_energy(&model, &chain3(), &theta, &cat).unwrap();
        // three penalised empty cylinders plus the chain interaction
        assert!((e - (-2.5 + 3.0 * params.penalty)).abs() < 1e-12);
    }
}
