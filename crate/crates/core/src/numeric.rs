//! Small numeric utilities: binomial weights, an inverse normal CDF,
//! adaptive quadrature, and the Beta CDFs used for deterministic sampling.

use crate::error::{LabError, Result};
use crate::scalar::Real;

/// Binomial pmf table `P(S = s)` for `s = 0..=n`, via the multiplicative
/// recurrence (no factorials, stable for the sample sizes used here).
pub fn binomial_weights<F: Real>(n: usize, theta: F) -> Vec<F> {
    let one = F::one();
    let mut w = Vec::with_capacity(n + 1);
    // P(S=0) = (1-theta)^n
    let mut cur = (one - theta).powi(n as i32);
    w.push(cur);
    let ratio = theta / (one - theta);
    for s in 0..n {
        // P(s+1) = P(s) * (n-s)/(s+1) * theta/(1-theta)
        let f = F::from_count(n - s) / F::from_count(s + 1);
        cur = cur * f * ratio;
        w.push(cur);
    }
    w
}

/// Standard normal quantile (Acklam's rational approximation, relative
/// error below 1.2e-9 over (0, 1)).
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(LabError::domain(format!(
            "quantile level must lie in (0,1), got {p}"
        )));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    Ok(x)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// CDF of Beta(2, 5) in closed form: the regularized incomplete beta with
/// integer parameters reduces to a binomial tail sum.
pub fn beta25_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // I_x(2,5) = sum_{j=2}^{6} C(6,j) x^j (1-x)^(6-j)
    const CHOOSE: [f64; 5] = [15.0, 20.0, 15.0, 6.0, 1.0];
    let mut acc = 0.0;
    for (i, c) in CHOOSE.iter().enumerate() {
        let j = (i + 2) as i32;
        acc += c * x.powi(j) * (1.0 - x).powi(6 - j);
    }
    acc
}

/// Inverse CDF of Beta(2, 5) by bisection on the closed-form CDF;
/// deterministic across platforms.
pub fn beta25_inverse_cdf(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // 60 halvings reach ~1e-18, beyond f64 resolution in (0,1).
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if beta25_cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inverse CDF of the arcsine law Beta(1/2, 1/2): `sin^2(pi u / 2)`.
pub fn arcsine_inverse_cdf(u: f64) -> f64 {
    let s = (std::f64::consts::FRAC_PI_2 * u).sin();
    s * s
}

/// Standard normal draw from a uniform pair via Box-Muller; used with
/// deterministic substreams.
pub fn normal_from_uniforms(u1: f64, u2: f64) -> f64 {
    let r = (-2.0 * u1.max(f64::MIN_POSITIVE).ln()).sqrt();
    r * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::distribution::{Beta, ContinuousCDF, Normal};

    #[test]
    fn binomial_weights_sum_to_one() {
        for &n in &[1usize, 5, 50, 100] {
            for &theta in &[0.01f64, 0.3, 0.5, 0.99] {
                let w = binomial_weights(n, theta);
                assert_eq!(w.len(), n + 1);
                let sum: f64 = w.iter().sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
                assert!(w.iter().all(|&x| x > 0.0));
            }
        }
    }

    #[test]
    fn binomial_weights_match_statrs() {
        use statrs::distribution::{Binomial, Discrete};
        let b = Binomial::new(0.3, 25).unwrap();
        let w = binomial_weights(25usize, 0.3f64);
        for (s, &ws) in w.iter().enumerate() {
            assert_abs_diff_eq!(ws, b.pmf(s as u64), epsilon = 1e-13);
        }
    }

    #[test]
    fn normal_quantile_against_statrs() {
        let n = Normal::new(0.0, 1.0).unwrap();
        for &p in &[0.001, 0.025, 0.1, 0.5, 0.9, 0.975, 0.999] {
            assert_abs_diff_eq!(
                normal_quantile(p).unwrap(),
                n.inverse_cdf(p),
                epsilon = 1e-7
            );
        }
        assert_abs_diff_eq!(
            normal_quantile(0.975).unwrap(),
            1.959_963_984_540_054,
            epsilon = 1e-8
        );
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
    }

    #[test]
    fn simpson_integrates_gaussian_density() {
        let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let v = adaptive_simpson(&f, -10.0, 10.0, 1e-12);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn beta25_cdf_matches_statrs() {
        let b = Beta::new(2.0, 5.0).unwrap();
        for i in 1..20 {
            let x = i as f64 / 20.0;
            assert_abs_diff_eq!(beta25_cdf(x), b.cdf(x), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(beta25_cdf(0.2), 0.34464, epsilon = 1e-12);
    }

    #[test]
    fn beta25_inverse_roundtrip() {
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let x = beta25_inverse_cdf(u);
            assert_abs_diff_eq!(beta25_cdf(x), u, epsilon = 1e-12);
        }
        // frozen median from an independent high-precision root find
        assert_abs_diff_eq!(
            beta25_inverse_cdf(0.5),
            0.264_449_983_295_66,
            epsilon = 1e-10
        );
    }

    #[test]
    fn arcsine_inverse_is_beta_half_half() {
        // statrs's inverse_cdf is a coarse root-find; roundtrip through
        // its accurate forward CDF instead.
        let b = Beta::new(0.5, 0.5).unwrap();
        for i in 1..20 {
            let u = i as f64 / 20.0;
            assert_abs_diff_eq!(b.cdf(arcsine_inverse_cdf(u)), u, epsilon = 1e-12);
        }
    }
}
