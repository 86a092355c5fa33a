use serde::{Deserialize, Serialize};

use super::special::sorted;
use crate::error::{Error, Result};

/// Hill estimates of the power-law index below and above the median.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailIndex {
    pub left: f64,
    pub right: f64,
    pub k: usize,
}

impl TailIndex {
    /// The heavier of the two tails.
    pub fn min(&self) -> f64 {
        self.left.min(self.right)
    }
}

/// Default number of order statistics: `n / 50`, clamped to `[10, 1000]`.
pub fn default_k(n: usize) -> usize {
    (n / 50).clamp(10, 1000)
}

/// Hill estimator on the `k` largest positive exceedances.
fn hill(mut excess: Vec<f64>, k: usize, side: &str) -> Result<f64> {
    excess.retain(|d| *d > 0.0);
    if excess.len() <= k {
        return Err(Error::invalid(format!(
            "{side} tail has {} positive exceedances over the median, need more than k = {k}",
            excess.len()
        )));
    }
    excess.sort_by(|a, b| b.total_cmp(a));
    let threshold = excess[k];
    let mean_log = excess[..k]
        .iter()
        .map(|d| (d / threshold).ln())
        .sum::<f64>()
        / k as f64;
    if !(mean_log > 0.0) {
        return Err(Error::invalid(format!(
            "{side} tail exceedances are all tied"
        )));
    }
    Ok(1.0 / mean_log)
}

/// Per-tail Hill estimates on `|values − median|`, each using the `k`
/// largest distances on its side of the median.
pub fn tail_index(values: &[f64], k: usize) -> Result<TailIndex> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }
    let s = sorted(values);
    if s.is_empty() {
        return Err(Error::invalid("no values"));
    }
    let median = super::special::quantile_sorted(&s, 0.5);
    let right = hill(s.iter().map(|v| v - median).collect(), k, "upper")?;
    let left = hill(s.iter().map(|v| median - v).collect(), k, "lower")?;
    Ok(TailIndex { left, right, k })
}
