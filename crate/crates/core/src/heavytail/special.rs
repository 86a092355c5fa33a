//! Trigamma, tanh-sinh quadrature and sample quantiles.

use std::f64::consts::FRAC_PI_2;

/// Second derivative of `ln Γ(x)` for `x > 0`.
pub fn trigamma(mut x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    // asymptotic series in 1/x
    acc + 1.0 / x
        + x2 / 2.0
        + (1.0 / x)
            * x2
            * (1.0 / 6.0
                - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 * (1.0 / 30.0 - x2 * 5.0 / 66.0))))
}

/// Integral of `f` over the finite interval `[a, b]` by tanh-sinh quadrature.
///
/// Integrable endpoint singularities are handled; `f` is never evaluated at
/// the endpoints themselves. See [`integrate_gaps`] for integrands that need
/// the distance to an endpoint below the resolution of `x`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a > b {
        return -integrate(f, b, a, tol);
    }
    integrate_gaps(
        |dl, dr| {
            let x = if dl <= dr { a + dl } else { b - dr };
            if x > a && x < b {
                f(x)
            } else {
                0.0
            }
        },
        a,
        b,
        tol,
    )
}

/// Tanh-sinh quadrature over `[a, b]` of `g(dl, dr)`, where `dl = x − a` and
/// `dr = b − x` are passed exactly, so singular integrands keep full
/// resolution near either end.
///
/// The step is halved until two successive levels agree to `tol`
/// (relative) or the level limit is reached.
pub fn integrate_gaps<G: Fn(f64, f64) -> f64>(g: G, a: f64, b: f64, tol: f64) -> f64 {
    if !(a < b) {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let eval = |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u).exp();
        // 1 - tanh(u) and 1 + tanh(u), without cancellation
        let near = half * 2.0 * e / (1.0 + e);
        let far = half * 2.0 / (1.0 + e);
        let cosh_u = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if !(w > 0.0) || !(near > 0.0) {
            return 0.0;
        }
        let mut s = g(far, near);
        if t > 0.0 {
            s += g(near, far);
        }
        w * s
    };
    let t_max = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        sum += eval(k as f64 * h);
        k += 1;
    }
    let mut estimate = half * h * sum;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            sum += eval(k as f64 * h);
            k += 2;
        }
        let next = half * h * sum;
        if (next - estimate).abs() <= tol * next.abs().max(1e-300) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Linear-interpolation sample quantile of sorted data, `p` in `[0, 1]`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

pub(crate) fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trigamma_known_values() {
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-12);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-12);
        // recurrence ψ1(x+1) = ψ1(x) - 1/x²
        for x in [0.3, 2.7, 11.0] {
            assert!((trigamma(x + 1.0) - trigamma(x) + 1.0 / (x * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_handles_endpoint_singularities() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-12) - 9.0).abs() < 1e-10);
        // ∫0^1 x^-1/2 = 2
        assert!((integrate(|x| x.powf(-0.5), 0.0, 1.0, 1e-10) - 2.0).abs() < 1e-7);
        let strong = integrate_gaps(|_, dr| dr.powf(-0.7), 0.0, 1.0, 1e-12);
        assert!((strong - 1.0 / 0.3).abs() < 1e-8, "{strong}");
        assert!((integrate(f64::cos, 1.0, 0.0, 1e-12) + 1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn quantiles_interpolate() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert_eq!(quantile_sorted(&s, 1.0), 4.0);
        assert!((quantile_sorted(&s, 0.5) - 2.5).abs() < 1e-15);
    }
}
