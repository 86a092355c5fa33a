//! Synthetic catalogs with planted structure.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::geometry::{Vec3, Window};
use crate::error::{Error, Result};

/// `n` points evenly spaced on the segment `from`-`to`, each jittered by an
/// isotropic Gaussian of standard deviation `jitter` and reflected into
/// `window`.
pub fn planted_line<R: Rng + ?Sized>(
    window: &Window,
    from: Vec3,
    to: Vec3,
    n: usize,
    jitter: f64,
    rng: &mut R,
) -> Result<Vec<Vec3>> {
    if n < 2 {
        return Err(Error::invalid("a planted line needs at least two points"));
    }
    let noise = Normal::new(0.0, jitter).map_err(|e| Error::invalid(format!("jitter: {e}")))?;
    Ok((0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            let p: Vec3 =
                std::array::from_fn(|d| from[d] + t * (to[d] - from[d]) + noise.sample(rng));
            window.reflect(p)
        })
        .collect())
}

/// `n` points uniform in `window`.
pub fn uniform_points<R: Rng + ?Sized>(window: &Window, n: usize, rng: &mut R) -> Vec<Vec3> {
    (0..n).map(|_| window.sample(rng)).collect()
}
