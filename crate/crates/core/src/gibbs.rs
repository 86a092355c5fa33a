//! Gibbs-energy posteriors.
//!
//! A pattern `x` observed through data `d` under parameters `θ` has the
//! unnormalised conditional density `exp(-(U_i(x|θ) + U_d(x|θ)))`. The
//! normalising constant is never evaluated: samplers only ever look at energy
//! differences, and MAP estimation minimises the annealing target below.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a random-walk proposal is folded back into a parameter's interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Mirror at the interval ends.
    #[default]
    Reflect,
    /// Treat `[lower, upper)` as a circle (angles).
    Wrap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            lower,
            upper,
            boundary: Boundary::Reflect,
        }
    }

    pub fn periodic(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            boundary: Boundary::Wrap,
            ..Self::new(name, lower, upper)
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        match self.boundary {
            Boundary::Reflect => v >= self.lower && v <= self.upper,
            Boundary::Wrap => v >= self.lower && v < self.upper,
        }
    }

    /// Map an arbitrary real back into the interval.
    ///
    /// Reflection is applied repeatedly, so a proposal that overshoots by
    /// several widths still lands inside; the resulting kernel is symmetric.
    pub fn fold(&self, v: f64) -> f64 {
        let w = self.width();
        if w == 0.0 {
            return self.lower;
        }
        match self.boundary {
            Boundary::Wrap => {
                let r = (v - self.lower).rem_euclid(w);
                // rem_euclid can round up to exactly w
                if r >= w {
                    self.lower
                } else {
                    self.lower + r
                }
            }
            Boundary::Reflect => {
                let r = (v - self.lower).rem_euclid(2.0 * w);
                let folded = if r <= w { r } else { 2.0 * w - r };
                (self.lower + folded).clamp(self.lower, self.upper)
            }
        }
    }
}

/// Named, bounded model parameters `θ`.
#[derive(Clone, PartialEq)]
pub struct ParameterVector {
    specs: Arc<[ParamSpec]>,
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn new(specs: Vec<ParamSpec>, values: Vec<f64>) -> Result<Self> {
        if specs.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} parameter specs but {} values",
                specs.len(),
                values.len()
            )));
        }
        for (i, s) in specs.iter().enumerate() {
            if !(s.lower <= s.upper) {
                return Err(Error::invalid(format!(
                    "parameter `{}` has empty interval [{}, {}]",
                    s.name, s.lower, s.upper
                )));
            }
            if specs[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::invalid(format!(
                    "duplicate parameter name `{}`",
                    s.name
                )));
            }
        }
        let pv = Self {
            specs: specs.into(),
            values,
        };
        pv.check_bounds()?;
        Ok(pv)
    }

    /// Same specs, new values (validated).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.specs.len() {
            return Err(Error::invalid("value count does not match parameter count"));
        }
        let pv = Self {
            specs: Arc::clone(&self.specs),
            values,
        };
        pv.check_bounds()?;
        Ok(pv)
    }

    /// Values already folded into bounds by the caller.
    pub(crate) fn with_folded(&self, values: Vec<f64>) -> Self {
        debug_assert!(values
            .iter()
            .zip(self.specs.iter())
            .all(|(v, s)| s.contains(*v)));
        Self {
            specs: Arc::clone(&self.specs),
            values,
        }
    }

    fn check_bounds(&self) -> Result<()> {
        for (s, v) in self.specs.iter().zip(&self.values) {
            if !s.contains(*v) {
                return Err(Error::invalid(format!(
                    "parameter `{}` = {v} outside [{}, {}]",
                    s.name, s.lower, s.upper
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn specs(&self) -> &[ParamSpec] {
        &self.specs
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.specs.iter().map(|s| s.name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.specs
            .iter()
            .position(|s| s.name == name)
            .map(|i| self.values[i])
    }
}

impl fmt::Debug for ParameterVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (s, v) in self.specs.iter().zip(&self.values) {
            m.entry(&s.name, v);
        }
        m.finish()
    }
}

/// The two energy terms of a Gibbs model plus the prior on its parameters.
///
/// Energies may return `f64::INFINITY` to mark a forbidden (hard-core)
/// state. NaN and `-inf` are never valid.
pub trait EnergyModel {
    type State;
    type Data: ?Sized;

    /// Reject states that are malformed rather than merely improbable.
    fn validate(&self, _state: &Self::State) -> Result<()> {
        Ok(())
    }

    fn interaction_energy(&self, state: &Self::State, theta: &ParameterVector) -> f64;

    fn data_energy(&self, state: &Self::State, theta: &ParameterVector, data: &Self::Data) -> f64;

    /// `log p(θ)`; flat by default.
    fn log_prior(&self, _theta: &ParameterVector) -> f64 {
        0.0
    }
}

/// `U_i(x|θ) + U_d(x|θ)`.
pub fn total_energy<M: EnergyModel>(
    model: &M,
    state: &M::State,
    theta: &ParameterVector,
    data: &M::Data,
) -> Result<f64> {
    model.validate(state)?;
    let ui = model.interaction_energy(state, theta);
    check_energy(ui, "interaction")?;
    if ui == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let ud = model.data_energy(state, theta, data);
    check_energy(ud, "data")?;
    Ok(ui + ud)
}

fn check_energy(u: f64, which: &str) -> Result<()> {
    if u.is_nan() || u == f64::NEG_INFINITY {
        return Err(Error::invalid(format!("{which} energy evaluated to {u}")));
    }
    Ok(())
}

/// `(U_i + U_d - log p(θ)) / T`, the quantity minimised by simulated
/// annealing. At `T = 1` it is the negative log-posterior up to the
/// (unevaluated) log partition function.
pub fn annealing_target<M: EnergyModel>(
    model: &M,
    state: &M::State,
    theta: &ParameterVector,
    data: &M::Data,
    temperature: f64,
) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::invalid(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let u = total_energy(model, state, theta, data)?;
    let lp = model.log_prior(theta);
    if lp.is_nan() {
        return Err(Error::invalid("log prior evaluated to NaN"));
    }
    Ok((u - lp) / temperature)
}

/// Geometric cooling schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealingSchedule {
    pub initial_temperature: f64,
    pub cooling_factor: f64,
    pub steps_per_level: usize,
    pub final_temperature: f64,
}

impl AnnealingSchedule {
    pub fn new(
        initial_temperature: f64,
        cooling_factor: f64,
        steps_per_level: usize,
        final_temperature: f64,
    ) -> Result<Self> {
        let s = Self {
            initial_temperature,
            cooling_factor,
            steps_per_level,
            final_temperature,
        };
        s.validate()?;
        Ok(s)
    }

    /// Cooling factor 0.95 and `max(10 * dimension, 100)` steps per level.
    pub fn with_defaults(
        initial_temperature: f64,
        final_temperature: f64,
        dimension: usize,
    ) -> Result<Self> {
        Self::new(
            initial_temperature,
            0.95,
            (10 * dimension).max(100),
            final_temperature,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return Err(Error::invalid(
                "initial temperature must be positive and finite",
            ));
        }
        if !(self.final_temperature > 0.0) {
            return Err(Error::invalid("final temperature must be positive"));
        }
        // equal temperatures give a single level (plain MH)
        if self.final_temperature > self.initial_temperature {
            return Err(Error::invalid(
                "final temperature exceeds initial temperature",
            ));
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(Error::invalid("cooling factor must lie in (0, 1)"));
        }
        if self.steps_per_level == 0 {
            return Err(Error::invalid("steps per level must be positive"));
        }
        Ok(())
    }

    /// Temperature ladder `T0, T0 c, T0 c², ...` down to the final temperature.
    pub fn temperatures(&self) -> Vec<f64> {
        let floor = self.final_temperature * (1.0 - 1e-12);
        let mut out = vec![self.initial_temperature];
        let mut t = self.initial_temperature * self.cooling_factor;
        while t >= floor {
            out.push(t);
            t *= self.cooling_factor;
        }
        out
    }

    pub fn total_steps(&self) -> usize {
        self.temperatures().len() * self.steps_per_level
    }
}
