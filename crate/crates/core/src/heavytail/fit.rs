use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use super::distribution::{ParetoTail, Regime, ScaledBeta, Tail, TailMixture};
use super::hill::{default_k, tail_index, TailIndex};
use super::special::{quantile_sorted, sorted, trigamma};
use crate::error::{Error, Result};

/// Which tail family to fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeChoice {
    /// Power-law tails when the Hill index of either tail is below 2.
    #[default]
    Auto,
    Heavy,
    Light,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Quantile of the lower split point.
    pub q_lo: f64,
    /// Quantile of the upper split point.
    pub q_hi: f64,
    pub regime: RegimeChoice,
    /// Order statistics used by the Hill estimator (default [`default_k`]).
    pub hill_k: Option<usize>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            q_lo: 0.05,
            q_hi: 0.95,
            regime: RegimeChoice::Auto,
            hill_k: None,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.q_lo && self.q_lo < self.q_hi && self.q_hi < 1.0) {
            return Err(Error::invalid(
                "split quantiles must satisfy 0 < q_lo < q_hi < 1",
            ));
        }
        if self.hill_k == Some(0) {
            return Err(Error::invalid("hill_k must be positive"));
        }
        Ok(())
    }
}

/// Tail index below which a tail counts as heavy.
pub const HEAVY_INDEX: f64 = 2.0;

/// Regime for `values` under `cfg`, with the Hill estimates when computed.
pub fn classify(values: &[f64], cfg: &FitConfig) -> Result<(Regime, Option<TailIndex>)> {
    match cfg.regime {
        RegimeChoice::Heavy => Ok((Regime::Heavy, None)),
        RegimeChoice::Light => Ok((Regime::Light, None)),
        RegimeChoice::Auto => {
            let k = cfg.hill_k.unwrap_or_else(|| default_k(values.len()));
            let t = tail_index(values, k)?;
            let r = if t.min() < HEAVY_INDEX {
                Regime::Heavy
            } else {
                Regime::Light
            };
            Ok((r, Some(t)))
        }
    }
}

/// Keeps `ln u` finite for points on the support ends.
const EDGE: f64 = 1e-6;

fn log_means(u: &[f64]) -> (f64, f64) {
    let n = u.len() as f64;
    let (mut a, mut b) = (0.0, 0.0);
    for &x in u {
        let x = x.clamp(EDGE, 1.0 - EDGE);
        a += x.ln();
        b += (1.0 - x).ln();
    }
    (a / n, b / n)
}

/// Beta(α, β) fit to data on `[0, 1]`: method of moments, then Newton steps
/// on the likelihood equations.
pub fn fit_unit_beta(u: &[f64]) -> Result<(f64, f64)> {
    let n = u.len();
    if n < 2 {
        return Err(Error::invalid("Beta fit needs at least two values"));
    }
    let mean = u.iter().sum::<f64>() / n as f64;
    let var = u.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let spread = u.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x))
        - u.iter().fold(f64::INFINITY, |m, x| m.min(*x));
    if !(var > 0.0) || !(spread > 0.0) {
        return Err(Error::invalid("degenerate sample: zero variance"));
    }
    let common = (mean * (1.0 - mean) / var - 1.0).max(1e-3);
    let mut a = (mean * common).max(1e-3);
    let mut b = ((1.0 - mean) * common).max(1e-3);

    let (la, lb) = log_means(u);
    for _ in 0..200 {
        let ds = digamma(a + b);
        let g1 = digamma(a) - ds - la;
        let g2 = digamma(b) - ds - lb;
        let ts = trigamma(a + b);
        let (j11, j22, j12) = (trigamma(a) - ts, trigamma(b) - ts, -ts);
        let det = j11 * j22 - j12 * j12;
        if !(det.abs() > 0.0) || !det.is_finite() {
            break;
        }
        let mut da = (j22 * g1 - j12 * g2) / det;
        let mut db = (j11 * g2 - j12 * g1) / det;
        // keep both shapes positive
        while a - da <= 0.0 || b - db <= 0.0 {
            da *= 0.5;
            db *= 0.5;
        }
        a -= da;
        b -= db;
        if da.abs() <= 1e-12 * a && db.abs() <= 1e-12 * b {
            return Ok((a, b));
        }
    }
    if a.is_finite() && b.is_finite() {
        Ok((a, b))
    } else {
        Err(Error::NonConvergence {
            what: "Beta likelihood".into(),
            iterations: 200,
        })
    }
}

/// Scaled Beta on `[lo, hi]` fitted to `values`.
pub fn fit_scaled_beta(values: &[f64], lo: f64, hi: f64) -> Result<ScaledBeta> {
    let w = hi - lo;
    let u: Vec<f64> = values.iter().map(|x| (x - lo) / w).collect();
    let (a, b) = fit_unit_beta(&u)?;
    ScaledBeta::new(a, b, lo, hi)
}

/// Share of the smallest exceedances left out of the tail likelihood.
pub const TAIL_TRUNCATION: f64 = 0.2;

/// Power-law tail fitted to distances `y >= 0` beyond a split point.
///
/// The smallest [`TAIL_TRUNCATION`] share of the distances is dropped: above
/// a cut `c` the law is again of the same family with scale `scale + c`, so
/// the fit is insensitive to where exactly the empirical split fell. The
/// remaining excesses are fitted by profile likelihood (for a fixed scale
/// the index has the closed form `m / Σ ln(1 + y/scale)`), the scale being
/// found by golden-section search on a log grid.
pub fn fit_pareto_tail(distances: &[f64]) -> Result<ParetoTail> {
    if distances.iter().any(|y| !(*y >= 0.0) || !y.is_finite()) {
        return Err(Error::invalid(
            "tail distances must be finite and nonnegative",
        ));
    }
    let ys = sorted(distances);
    let cut = if ys.len() >= 10 {
        quantile_sorted(&ys, TAIL_TRUNCATION)
    } else {
        0.0
    };
    let excess: Vec<f64> = ys.iter().filter(|y| **y > cut).map(|y| y - cut).collect();
    let (scale, index) = lomax_profile(&excess)?;
    // scale + cut is what the excesses see; keep a positive remainder
    ParetoTail::new((scale - cut).max(1e-3 * scale), index)
}

fn lomax_profile(ys: &[f64]) -> Result<(f64, f64)> {
    let m = ys.len();
    if m < 2 {
        return Err(Error::invalid(
            "Pareto tail fit needs at least two exceedances",
        ));
    }
    let typical = quantile_sorted(ys, 0.5).max(ys[m - 1] * 1e-3);
    if !(typical > 0.0) {
        return Err(Error::invalid("Pareto tail exceedances are all zero"));
    }
    let mf = m as f64;
    let log_sum = |s: f64| ys.iter().map(|y| (y / s).ln_1p()).sum::<f64>();
    let profile = |ls: f64| {
        let sum = log_sum(ls.exp());
        let a = mf / sum;
        mf * a.ln() - mf * ls - (a + 1.0) * sum
    };
    let (mut lo, mut hi) = (typical.ln() - 12.0, typical.ln() + 12.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (profile(x1), profile(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = profile(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = profile(x1);
        }
    }
    let s = (0.5 * (lo + hi)).exp();
    Ok((s, mf / log_sum(s)))
}

/// Fallback for a tail holding no data: zero weight, placeholder law.
fn empty_tail(regime: Regime, split: f64, width: f64, upper: bool) -> Result<Tail> {
    Ok(match regime {
        Regime::Heavy => Tail::Pareto(ParetoTail::new(0.01 * width, 2.0)?),
        Regime::Light => {
            let d = 1e-3 * width;
            let (lo, hi) = if upper {
                (split, split + d)
            } else {
                (split - d, split)
            };
            Tail::Beta(ScaledBeta::new(1.0, 1.0, lo, hi)?)
        }
    })
}

/// Three-piece fit: splits at empirical quantiles, scaled Beta center,
/// power-law or Beta tails, empirical weights.
pub fn fit_mixture(values: &[f64], cfg: &FitConfig) -> Result<TailMixture> {
    fit_mixture_detailed(values, cfg).map(|(m, _)| m)
}

/// [`fit_mixture`] also returning the Hill estimates used for the regime.
pub fn fit_mixture_detailed(
    values: &[f64],
    cfg: &FitConfig,
) -> Result<(TailMixture, Option<TailIndex>)> {
    cfg.validate()?;
    if values.len() < 100 {
        return Err(Error::invalid(format!(
            "need at least 100 values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }
    let s = sorted(values);
    let split_lo = quantile_sorted(&s, cfg.q_lo);
    let split_hi = quantile_sorted(&s, cfg.q_hi);
    if !(split_lo < split_hi) {
        return Err(Error::invalid(
            "degenerate center: split quantiles coincide",
        ));
    }
    let (regime, index) = classify(values, cfg)?;

    let left: Vec<f64> = s.iter().copied().filter(|x| *x < split_lo).collect();
    let right: Vec<f64> = s.iter().copied().filter(|x| *x > split_hi).collect();
    let center: Vec<f64> = s
        .iter()
        .copied()
        .filter(|x| *x >= split_lo && *x <= split_hi)
        .collect();
    let n = s.len() as f64;
    let weights = [
        left.len() as f64 / n,
        center.len() as f64 / n,
        right.len() as f64 / n,
    ];
    let center_law = fit_scaled_beta(&center, split_lo, split_hi)?;
    let width = split_hi - split_lo;

    let fit_tail = |data: &[f64], upper: bool| -> Result<Tail> {
        let split = if upper { split_hi } else { split_lo };
        if data.len() < 2 {
            return empty_tail(regime, split, width, upper);
        }
        match regime {
            Regime::Heavy => {
                let d: Vec<f64> = data.iter().map(|x| (x - split).abs()).collect();
                Ok(Tail::Pareto(fit_pareto_tail(&d)?))
            }
            Regime::Light => {
                let m = data.len() as f64;
                let (lo, hi) = if upper {
                    let max = data[data.len() - 1];
                    (split, max + (max - split) / m)
                } else {
                    let min = data[0];
                    (min - (split - min) / m, split)
                };
                match fit_scaled_beta(data, lo, hi) {
                    Ok(b) => Ok(Tail::Beta(b)),
                    // tied tail values: flat law on the same support
                    Err(Error::InvalidInput(_)) => {
                        Ok(Tail::Beta(ScaledBeta::new(1.0, 1.0, lo, hi)?))
                    }
                    Err(e) => Err(e),
                }
            }
        }
    };
    let mixture = TailMixture {
        center: center_law,
        left: fit_tail(&left, false)?,
        right: fit_tail(&right, true)?,
        split_lo,
        split_hi,
        weights,
    };
    mixture.validate()?;
    Ok((mixture, index))
}
