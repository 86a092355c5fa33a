use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, inv_beta_reg, ln_beta};

use super::special::{integrate, integrate_gaps};
use crate::error::{Error, Result};

/// Beta(α, β) mapped affinely onto `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledBeta {
    pub alpha: f64,
    pub beta: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ScaledBeta {
    pub fn new(alpha: f64, beta: f64, lo: f64, hi: f64) -> Result<Self> {
        let b = Self {
            alpha,
            beta,
            lo,
            hi,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0)
            || !self.alpha.is_finite()
            || !self.beta.is_finite()
        {
            return Err(Error::invalid("Beta shapes must be positive and finite"));
        }
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::invalid(
                "Beta support must be a finite interval with lo < hi",
            ));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        let u = (x - self.lo) / self.width();
        if u == 0.0 || u == 1.0 {
            let (here, other) = if u == 0.0 {
                (self.alpha, self.beta)
            } else {
                (self.beta, self.alpha)
            };
            return if here < 1.0 {
                f64::INFINITY
            } else if here > 1.0 {
                0.0
            } else {
                other / self.width()
            };
        }
        ((self.alpha - 1.0) * u.ln() + (self.beta - 1.0) * (1.0 - u).ln()
            - ln_beta(self.alpha, self.beta)
            - self.width().ln())
        .exp()
    }

    /// Density at the point `dl` above `lo` and `dr` below `hi`.
    pub fn pdf_gaps(&self, dl: f64, dr: f64) -> f64 {
        let w = self.width();
        let (u, v) = (dl / w, dr / w);
        if !(u > 0.0 && v > 0.0) {
            return self.pdf(if u <= 0.0 { self.lo } else { self.hi });
        }
        ((self.alpha - 1.0) * u.ln() + (self.beta - 1.0) * v.ln()
            - ln_beta(self.alpha, self.beta)
            - w.ln())
        .exp()
    }

    /// Probability mass by quadrature.
    pub fn mass(&self) -> f64 {
        integrate_gaps(|dl, dr| self.pdf_gaps(dl, dr), self.lo, self.hi, 1e-12)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            0.0
        } else if x >= self.hi {
            1.0
        } else {
            beta_reg(self.alpha, self.beta, (x - self.lo) / self.width())
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return self.lo;
        }
        if p >= 1.0 {
            return self.hi;
        }
        let u = inv_beta_reg(self.alpha, self.beta, p).clamp(0.0, 1.0);
        (self.lo + self.width() * u).clamp(self.lo, self.hi)
    }

    pub fn mean(&self) -> f64 {
        self.lo + self.width() * self.alpha / (self.alpha + self.beta)
    }

    fn affine(&self, scale: f64, shift: f64) -> Self {
        Self {
            lo: scale * self.lo + shift,
            hi: scale * self.hi + shift,
            ..*self
        }
    }
}

/// Power-law tail attached by translation at a split point `s`: the distance
/// `y = |x − s|` has survival `(1 + y/scale)^(−index)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoTail {
    pub scale: f64,
    pub index: f64,
}

impl ParetoTail {
    pub fn new(scale: f64, index: f64) -> Result<Self> {
        let t = Self { scale, index };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.index > 0.0)
            || !self.scale.is_finite()
            || !self.index.is_finite()
        {
            return Err(Error::invalid(
                "Pareto scale and index must be positive and finite",
            ));
        }
        Ok(())
    }

    /// Density of the distance `y >= 0`.
    pub fn pdf(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        self.index / self.scale * (1.0 + y / self.scale).powf(-self.index - 1.0)
    }

    pub fn survival(&self, y: f64) -> f64 {
        if y <= 0.0 {
            1.0
        } else {
            (1.0 + y / self.scale).powf(-self.index)
        }
    }

    /// Distance whose survival probability is `s`.
    pub fn distance_at_survival(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return f64::INFINITY;
        }
        self.scale * (s.min(1.0).powf(-1.0 / self.index) - 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    Pareto(ParetoTail),
    Beta(ScaledBeta),
}

/// Tail behaviour of a fitted mixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Heavy,
    Light,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Heavy => "heavy",
            Regime::Light => "light",
        }
    }
}

/// Three-piece distribution: a scaled Beta on `[split_lo, split_hi]` and a
/// tail below and above, with weights `[left, center, right]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailMixture {
    pub center: ScaledBeta,
    pub left: Tail,
    pub right: Tail,
    pub split_lo: f64,
    pub split_hi: f64,
    pub weights: [f64; 3],
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl TailMixture {
    pub fn validate(&self) -> Result<()> {
        if !(self.split_lo < self.split_hi)
            || !self.split_lo.is_finite()
            || !self.split_hi.is_finite()
        {
            return Err(Error::invalid(
                "split points must be finite with split_lo < split_hi",
            ));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid("mixture weights must be nonnegative"));
        }
        if (self.weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("mixture weights must sum to 1"));
        }
        self.center.validate()?;
        if !close(self.center.lo, self.split_lo) || !close(self.center.hi, self.split_hi) {
            return Err(Error::invalid(
                "center support must equal [split_lo, split_hi]",
            ));
        }
        match self.left {
            Tail::Pareto(p) => p.validate()?,
            Tail::Beta(b) => {
                b.validate()?;
                if !close(b.hi, self.split_lo) {
                    return Err(Error::invalid("left Beta tail must end at split_lo"));
                }
            }
        }
        match self.right {
            Tail::Pareto(p) => p.validate()?,
            Tail::Beta(b) => {
                b.validate()?;
                if !close(b.lo, self.split_hi) {
                    return Err(Error::invalid("right Beta tail must start at split_hi"));
                }
            }
        }
        Ok(())
    }

    /// Heavy when either tail is a power law.
    pub fn regime(&self) -> Regime {
        if matches!(self.left, Tail::Pareto(_)) || matches!(self.right, Tail::Pareto(_)) {
            Regime::Heavy
        } else {
            Regime::Light
        }
    }

    /// Lower and upper ends of the support (possibly infinite).
    pub fn support(&self) -> (f64, f64) {
        let lo = match self.left {
            Tail::Pareto(_) => f64::NEG_INFINITY,
            Tail::Beta(b) => b.lo,
        };
        let hi = match self.right {
            Tail::Pareto(_) => f64::INFINITY,
            Tail::Beta(b) => b.hi,
        };
        (lo, hi)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let [wl, wc, wr] = self.weights;
        if x < self.split_lo {
            wl * match self.left {
                Tail::Pareto(p) => p.pdf(self.split_lo - x),
                Tail::Beta(b) => b.pdf(x),
            }
        } else if x <= self.split_hi {
            wc * self.center.pdf(x)
        } else {
            wr * match self.right {
                Tail::Pareto(p) => p.pdf(x - self.split_hi),
                Tail::Beta(b) => b.pdf(x),
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let [wl, wc, wr] = self.weights;
        if x < self.split_lo {
            wl * match self.left {
                Tail::Pareto(p) => p.survival(self.split_lo - x),
                Tail::Beta(b) => b.cdf(x),
            }
        } else if x <= self.split_hi {
            wl + wc * self.center.cdf(x)
        } else {
            let upper = match self.right {
                Tail::Pareto(p) => p.survival(x - self.split_hi),
                Tail::Beta(b) => 1.0 - b.cdf(x),
            };
            (wl + wc + wr * (1.0 - upper)).min(1.0)
        }
    }

    /// Inverse-transform draw within component `k` (0 left, 1 center,
    /// 2 right) from a uniform `u`.
    fn component_quantile(&self, k: usize, u: f64) -> f64 {
        match k {
            0 => match self.left {
                Tail::Pareto(p) => self.split_lo - p.distance_at_survival(u),
                Tail::Beta(b) => b.quantile(u),
            },
            1 => self.center.quantile(u),
            _ => match self.right {
                Tail::Pareto(p) => self.split_hi + p.distance_at_survival(1.0 - u),
                Tail::Beta(b) => b.quantile(u),
            },
        }
    }

    /// Quantile of the whole mixture.
    pub fn quantile(&self, p: f64) -> f64 {
        let [wl, wc, _] = self.weights;
        if p < wl {
            self.component_quantile(0, p / wl)
        } else if p <= wl + wc && wc > 0.0 {
            self.component_quantile(1, ((p - wl) / wc).min(1.0))
        } else {
            let wr = 1.0 - wl - wc;
            self.component_quantile(2, ((p - wl - wc) / wr).clamp(0.0, 1.0))
        }
    }

    /// One draw: a component by weight, then inverse transform inside it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let c: f64 = rng.random();
        let u: f64 = rng.random();
        let [wl, wc, _] = self.weights;
        let k = if c < wl {
            0
        } else if c < wl + wc {
            1
        } else {
            2
        };
        // avoid the infinite distance at u = 0 for power-law tails
        let u = u.max(f64::MIN_POSITIVE);
        self.component_quantile(k, u)
    }

    /// Total probability mass by numerical quadrature; power-law tails are
    /// integrated numerically up to the 1e-3 survival point and the rest is
    /// added analytically.
    pub fn total_mass(&self) -> f64 {
        let tol = 1e-12;
        let [wl, wc, wr] = self.weights;
        let piece = |tail: Tail| -> f64 {
            match tail {
                Tail::Beta(b) => b.mass(),
                Tail::Pareto(p) => {
                    let cut = p.distance_at_survival(1e-3);
                    let body = integrate(|y| p.pdf(y), 0.0, cut, tol);
                    body + p.survival(cut)
                }
            }
        };
        wl * piece(self.left) + wc * self.center.mass() + wr * piece(self.right)
    }

    /// The same law for `scale · X + shift`, `scale > 0`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::invalid("affine scale must be positive"));
        }
        let tail = |t: Tail| match t {
            Tail::Pareto(p) => Tail::Pareto(ParetoTail {
                scale: p.scale * scale,
                ..p
            }),
            Tail::Beta(b) => Tail::Beta(b.affine(scale, shift)),
        };
        Ok(Self {
            center: self.center.affine(scale, shift),
            left: tail(self.left),
            right: tail(self.right),
            split_lo: scale * self.split_lo + shift,
            split_hi: scale * self.split_hi + shift,
            weights: self.weights,
        })
    }
}

/// `n` independent draws from `mixture`.
pub fn simulate<R: Rng + ?Sized>(mixture: &TailMixture, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| mixture.sample(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    pub(crate) fn heavy() -> TailMixture {
        TailMixture {
            center: ScaledBeta::new(2.0, 2.0, -1.0, 1.0).unwrap(),
            left: Tail::Pareto(ParetoTail::new(0.5, 1.5).unwrap()),
            right: Tail::Pareto(ParetoTail::new(0.5, 1.5).unwrap()),
            split_lo: -1.0,
            split_hi: 1.0,
            weights: [0.05, 0.9, 0.05],
        }
    }

    fn light() -> TailMixture {
        TailMixture {
            center: ScaledBeta::new(1.5, 3.0, 0.0, 2.0).unwrap(),
            left: Tail::Beta(ScaledBeta::new(2.0, 1.0, -0.5, 0.0).unwrap()),
            right: Tail::Beta(ScaledBeta::new(1.0, 2.0, 2.0, 3.0).unwrap()),
            split_lo: 0.0,
            split_hi: 2.0,
            weights: [0.1, 0.8, 0.1],
        }
    }

    #[test]
    fn masses_are_one() {
        for m in [heavy(), light()] {
            m.validate().unwrap();
            assert!((m.total_mass() - 1.0).abs() < 1e-6, "{}", m.total_mass());
        }
    }

    #[test]
    fn singular_beta_mass() {
        let b = ScaledBeta::new(0.3, 0.4, -2.0, 5.0).unwrap();
        assert!((b.mass() - 1.0).abs() < 1e-8, "{}", b.mass());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for m in [heavy(), light()] {
            for k in 1..100 {
                let p = k as f64 / 100.0;
                let x = m.quantile(p);
                assert!((m.cdf(x) - p).abs() < 1e-9, "p {p} x {x} cdf {}", m.cdf(x));
            }
        }
    }

    #[test]
    fn simulate_zero_is_empty() {
        assert!(simulate(&heavy(), 0, &mut rng::from_seed(1)).is_empty());
    }

    #[test]
    fn contiguity_is_checked() {
        let mut m = light();
        m.split_hi = 2.5;
        assert!(m.validate().is_err());
        let mut m = heavy();
        m.weights = [0.1, 0.9, 0.1];
        assert!(m.validate().is_err());
        assert_eq!(heavy().regime(), Regime::Heavy);
        assert_eq!(light().regime(), Regime::Light);
    }

    #[test]
    fn affine_maps_quantiles() {
        let m = heavy();
        let a = m.affine(3.0, -2.0).unwrap();
        for p in [0.01, 0.3, 0.5, 0.97] {
            assert!((a.quantile(p) - (3.0 * m.quantile(p) - 2.0)).abs() < 1e-9);
        }
    }
}
