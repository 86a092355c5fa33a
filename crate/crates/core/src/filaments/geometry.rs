use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::{FlatState, PointConfiguration};

pub type Vec3 = [f64; 3];

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm2(a: Vec3) -> f64 {
    dot(a, a)
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub min: Vec3,
    pub max: Vec3,
}

impl Window {
    pub fn new(min: Vec3, max: Vec3) -> Result<Self> {
        let w = Self { min, max };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..3 {
            if !(self.min[k] < self.max[k]) || !self.min[k].is_finite() || !self.max[k].is_finite()
            {
                return Err(Error::invalid(format!(
                    "window axis {k} is empty or not finite"
                )));
            }
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|k| self.max[k] - self.min[k]).product()
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    /// Bounding box of `points` widened by `pad_fraction` of each side.
    pub fn bounding(points: &[Vec3], pad_fraction: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("cannot bound an empty point set"));
        }
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for p in points {
            for k in 0..3 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        for k in 0..3 {
            let side = max[k] - min[k];
            let pad = if side > 0.0 { side * pad_fraction } else { 1.0 };
            min[k] -= pad;
            max[k] += pad;
        }
        Self::new(min, max)
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        std::array::from_fn(|k| self.min[k] + (self.max[k] - self.min[k]) * rng.random::<f64>())
    }

    /// Mirror a coordinate back into the box.
    pub(crate) fn reflect(&self, p: Vec3) -> Vec3 {
        std::array::from_fn(|k| {
            let (lo, hi) = (self.min[k], self.max[k]);
            let w = hi - lo;
            let r = (p[k] - lo).rem_euclid(2.0 * w);
            let v = if r <= w { r } else { 2.0 * w - r };
            (lo + v).clamp(lo, hi)
        })
    }
}

/// A cylinder of influence around an undirected axis.
///
/// The orientation is stored as polar and azimuthal angles, so the axis is a
/// unit vector by construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub center: Vec3,
    /// angle from +z, radians in `[0, π]`
    pub polar: f64,
    /// radians in `[0, 2π)`
    pub azimuth: f64,
    pub half_length: f64,
    pub radius: f64,
}

impl Segment {
    pub fn new(center: Vec3, direction: Vec3, half_length: f64, radius: f64) -> Result<Self> {
        let n = norm2(direction).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("segment direction must be a nonzero vector"));
        }
        let d = direction.map(|c| c / n);
        let polar = d[2].clamp(-1.0, 1.0).acos();
        let azimuth = d[1].atan2(d[0]).rem_euclid(TAU);
        let s = Self {
            center,
            polar,
            azimuth,
            half_length,
            radius,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_length > 0.0) || !self.half_length.is_finite() {
            return Err(Error::invalid("segment half-length must be positive"));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::invalid("segment radius must be positive"));
        }
        if !self.center.iter().all(|c| c.is_finite())
            || !self.polar.is_finite()
            || !self.azimuth.is_finite()
        {
            return Err(Error::invalid("segment coordinates must be finite"));
        }
        Ok(())
    }

    pub fn direction(&self) -> Vec3 {
        let (st, ct) = self.polar.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn endpoints(&self) -> [Vec3; 2] {
        let d = self.direction();
        let h = self.half_length;
        let c = self.center;
        [
            [c[0] - h * d[0], c[1] - h * d[1], c[2] - h * d[2]],
            [c[0] + h * d[0], c[1] + h * d[1], c[2] + h * d[2]],
        ]
    }

    /// Angle in `[0, π/2]` between the undirected axes of two segments.
    pub fn axis_angle(&self, other: &Segment) -> f64 {
        dot(self.direction(), other.direction())
            .abs()
            .min(1.0)
            .acos()
    }

    pub fn translated(&self, by: Vec3) -> Self {
        Self {
            center: [
                self.center[0] + by[0],
                self.center[1] + by[1],
                self.center[2] + by[2],
            ],
            ..*self
        }
    }
}

/// Mark law used for births and the proposal scales used by change moves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct MarkLaw {
    pub half_length: [f64; 2],
    pub radius: f64,
    pub center_sd: f64,
    pub angle_sd: f64,
    pub length_sd: f64,
}

/// Finite set of segments with centers in `window`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedConfiguration {
    pub window: Window,
    pub segments: Vec<Segment>,
    #[serde(skip)]
    pub(crate) marks: Option<MarkLaw>,
}

impl MarkedConfiguration {
    pub fn new(window: Window, segments: Vec<Segment>) -> Result<Self> {
        let c = Self {
            window,
            segments,
            marks: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn empty(window: Window) -> Self {
        Self {
            window,
            segments: Vec::new(),
            marks: None,
        }
    }

    pub(crate) fn with_marks(mut self, marks: MarkLaw) -> Self {
        self.marks = Some(marks);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            s.validate()
                .map_err(|e| Error::invalid(format!("segment {i}: {e}")))?;
            if !self.window.contains(s.center) {
                return Err(Error::invalid(format!(
                    "segment {i} center lies outside the window"
                )));
            }
        }
        Ok(())
    }

    fn mark_law(&self) -> MarkLaw {
        self.marks
            .expect("configuration used by a sampler needs a mark law")
    }
}

impl PointConfiguration for MarkedConfiguration {
    type Object = Segment;

    fn len(&self) -> usize {
        self.segments.len()
    }

    fn volume(&self) -> f64 {
        self.window.volume()
    }

    fn sample_object<R: Rng + ?Sized>(&self, rng: &mut R) -> Segment {
        let m = self.mark_law();
        let center = self.window.sample(rng);
        // uniform on the sphere
        let polar = (1.0 - 2.0 * rng.random::<f64>()).clamp(-1.0, 1.0).acos();
        let azimuth = TAU * rng.random::<f64>();
        let [lo, hi] = m.half_length;
        Segment {
            center,
            polar,
            azimuth,
            half_length: lo + (hi - lo) * rng.random::<f64>(),
            radius: m.radius,
        }
    }

    fn perturb<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> Segment {
        let m = self.mark_law();
        let s = &self.segments[index];
        let mut g = || rng.sample::<f64, _>(StandardNormal);
        let center = self.window.reflect([
            s.center[0] + m.center_sd * g(),
            s.center[1] + m.center_sd * g(),
            s.center[2] + m.center_sd * g(),
        ]);
        // isotropic jitter of the axis: the kernel depends only on the angle
        // between old and new axis, hence symmetric on the sphere
        let d = s.direction();
        let nd = [
            d[0] + m.angle_sd * g(),
            d[1] + m.angle_sd * g(),
            d[2] + m.angle_sd * g(),
        ];
        let n = norm2(nd).sqrt().max(f64::MIN_POSITIVE);
        let nd = nd.map(|c| c / n);
        let [lo, hi] = m.half_length;
        let half_length = if hi > lo {
            let w = hi - lo;
            let r = (s.half_length + m.length_sd * g() - lo).rem_euclid(2.0 * w);
            lo + if r <= w { r } else { 2.0 * w - r }
        } else {
            s.half_length
        };
        Segment {
            center,
            polar: nd[2].clamp(-1.0, 1.0).acos(),
            azimuth: nd[1].atan2(nd[0]).rem_euclid(TAU),
            half_length,
            radius: s.radius,
        }
    }

    fn insert(&mut self, object: Segment) {
        self.segments.push(object);
    }

    fn remove(&mut self, index: usize) -> Segment {
        self.segments.swap_remove(index)
    }

    fn replace(&mut self, index: usize, object: Segment) {
        self.segments[index] = object;
    }
}

impl FlatState for MarkedConfiguration {
    /// Seven numbers per segment: center, unit axis, half-length.
    fn flatten(&self) -> Vec<f64> {
        self.segments
            .iter()
            .flat_map(|s| {
                let d = s.direction();
                [
                    s.center[0],
                    s.center[1],
                    s.center[2],
                    d[0],
                    d[1],
                    d[2],
                    s.half_length,
                ]
            })
            .collect()
    }
}

/// Galaxy positions inside an observation window.
#[derive(Clone, Debug, PartialEq)]
pub struct GalaxyCatalog {
    pub positions: Vec<Vec3>,
    pub window: Window,
}

impl GalaxyCatalog {
    pub fn new(positions: Vec<Vec3>, window: Window) -> Result<Self> {
        window.validate()?;
        if let Some(i) = positions.iter().position(|p| !window.contains(*p)) {
            return Err(Error::invalid(format!(
                "galaxy {i} lies outside the window"
            )));
        }
        Ok(Self { positions, window })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}
