//! Error model of the DDL estimate on the K-symbol task as a function of the
//! split fraction `alpha = m / n`, and the split that minimizes it.
//!
//! With `L = log2(alpha)`, the mean squared error up to an
//! `alpha`-independent constant is
//!
//! ```text
//! K² L² / (2 n² (1-α)²)  +  f(K) / (n (1-α))  -  K L / (2 n² (1-α))
//! ```
//!
//! `f(K) <= 2` aggregates the variance terms and is treated as a free
//! parameter. Keeping the dominant terms of the stationarity condition gives
//! `n α f ln2 ln4 = -2 K² ln α`, solved by the Lambert W function.

use serde::{Deserialize, Serialize};
use std::f64::consts::{E, LN_2};

use crate::error::{DdlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    /// Alphabet size (number of free parameters).
    pub k: u32,
    pub n: f64,
    /// Variance aggregate `f(K)`, in `(0, 2]`.
    pub f_k: f64,
}

impl AnalysisParams {
    pub fn new(k: u32, n: f64, f_k: f64) -> Result<Self> {
        if k == 0 {
            return Err(DdlError::config("alphabet size must be at least 1"));
        }
        if !(n.is_finite() && n >= 2.0) {
            return Err(DdlError::config(format!("sample count {n} must be at least 2")));
        }
        if !(f_k > 0.0 && f_k <= 2.0) {
            return Err(DdlError::config(format!("f(K) = {f_k} outside (0, 2]")));
        }
        Ok(Self { k, n, f_k })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(DdlError::domain(format!("split fraction {alpha} outside (0, 1)")))
    }
}

/// Mean squared error of DDL at split fraction `alpha`, constant dropped.
pub fn mse_alpha(alpha: f64, p: &AnalysisParams) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(mse_unchecked(alpha, p))
}

fn mse_unchecked(a: f64, p: &AnalysisParams) -> f64 {
    let k = p.k as f64;
    let n2 = p.n * p.n;
    let l = a.log2();
    let u = 1.0 - a;
    k * k * l * l / (2.0 * n2 * u * u) + p.f_k / (p.n * u) - k * l / (2.0 * n2 * u)
}

/// Analytic derivative of [`mse_alpha`] with respect to `alpha`.
pub fn mse_alpha_derivative(alpha: f64, p: &AnalysisParams) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(derivative_unchecked(alpha, p))
}

fn derivative_unchecked(a: f64, p: &AnalysisParams) -> f64 {
    let k = p.k as f64;
    let n2 = p.n * p.n;
    let l = a.log2();
    let dl = 1.0 / (a * LN_2);
    let u = 1.0 - a;
    let d_bias = k * k / (2.0 * n2) * (2.0 * l * dl / (u * u) + 2.0 * l * l / (u * u * u));
    let d_var = p.f_k / (p.n * u * u);
    let d_cross = -k / (2.0 * n2) * (dl / u + l / (u * u));
    d_bias + d_var + d_cross
}

/// Principal branch of the Lambert W function: the `w >= -1` with
/// `w e^w = z`, for `z >= -1/e`.
pub fn lambert_w(z: f64) -> Result<f64> {
    const BRANCH: f64 = -1.0 / E;
    if z.is_nan() || z < BRANCH - 1e-15 {
        return Err(DdlError::domain(format!("Lambert W argument {z} below -1/e")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if z <= BRANCH {
        return Ok(-1.0);
    }

    let mut w = if z < -0.25 {
        // Series about the branch point.
        let q = (2.0 * (E * z + 1.0)).sqrt();
        -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q
    } else if z < 3.0 {
        0.5 * (1.0 + z).ln() + 0.25 * z / (1.0 + z)
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    let tol = 1e-13 * z.abs().max(1.0);
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        if f.abs() <= tol {
            break;
        }
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        // Halley step.
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 1e-16 * w.abs().max(1.0) {
            break;
        }
    }
    Ok(w)
}

/// Optimal split fractions for given analysis parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalAlpha {
    /// Lambert-W closed form of the dominant-term stationarity condition,
    /// clamped to `(0, 1)`.
    pub closed_form: f64,
    /// The closed form was `>= 1` (tiny `n`) and was clamped.
    pub saturated: bool,
    /// Leading-order asymptote `2K² ln n / (f(K) ln2 ln4 n)`, unclamped.
    pub leading_order: f64,
    /// Exact stationary point of [`mse_alpha`], found by bisection on the
    /// analytic derivative.
    pub stationary: f64,
}

/// Closed-form, asymptotic and exact optimal split fractions.
pub fn optimal_alpha(p: &AnalysisParams) -> Result<OptimalAlpha> {
    let k2 = (p.k as f64).powi(2);
    let scale = p.n * p.f_k * LN_2 * (4.0f64).ln();
    let c = scale / (2.0 * k2);
    let raw = lambert_w(c)? / c;
    let saturated = raw.is_nan() || raw >= 1.0;
    let closed_form = if saturated { 1.0 - f64::EPSILON } else { raw };
    let leading_order = 2.0 * k2 * p.n.ln() / scale;
    Ok(OptimalAlpha { closed_form, saturated, leading_order, stationary: stationary_alpha(p) })
}

fn stationary_alpha(p: &AnalysisParams) -> f64 {
    // The derivative tends to -inf at 0+ and +inf at 1-.
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    for _ in 0..2000 {
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if derivative_unchecked(mid, p) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First term of the DDL error decomposition, `K / (2(n-m)) log2(n/m)`.
pub fn ddl_bias_term(n: u64, m: u64, k: u32) -> Result<f64> {
    if m == 0 || m >= n {
        return Err(DdlError::config(format!("split point m = {m} must satisfy 0 < m < n = {n}")));
    }
    Ok(k as f64 / (2.0 * (n - m) as f64) * (n as f64 / m as f64).log2())
}

/// `(alpha, mse)` pairs on a uniform grid of `points` interior fractions.
pub fn mse_curve(p: &AnalysisParams, points: usize) -> Vec<(f64, f64)> {
    (1..=points)
        .map(|i| {
            let a = i as f64 / (points + 1) as f64;
            (a, mse_unchecked(a, p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: u32, n: f64) -> AnalysisParams {
        AnalysisParams::new(k, n, 1.0).unwrap()
    }

    #[test]
    fn singular_at_both_ends() {
        let p = params(10, 1000.0);
        let mid = mse_alpha(0.3, &p).unwrap();
        assert!(mse_alpha(1e-200, &p).unwrap() > 1e3 * mid);
        assert!(mse_alpha(1.0 - 1e-12, &p).unwrap() > 1e3 * mid);
        assert!(matches!(mse_alpha(0.0, &p), Err(DdlError::Domain(_))));
        assert!(mse_alpha(1.0, &p).is_err());
        assert!(mse_alpha(-0.5, &p).is_err());
    }

    #[test]
    fn params_are_validated() {
        assert!(AnalysisParams::new(0, 100.0, 1.0).is_err());
        assert!(AnalysisParams::new(1, 1.0, 1.0).is_err());
        assert!(AnalysisParams::new(1, 100.0, 2.5).is_err());
        assert!(AnalysisParams::new(1, 100.0, 0.0).is_err());
        assert!(AnalysisParams::new(1, 100.0, 2.0).is_ok());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for &(k, n) in &[(2, 1e3), (10, 1e4), (20, 1e5)] {
            let p = params(k, n);
            for &a in &[0.01, 0.1, 0.4, 0.8, 0.97] {
                let h = 1e-6 * a;
                let fd = (mse_unchecked(a + h, &p) - mse_unchecked(a - h, &p)) / (2.0 * h);
                let an = mse_alpha_derivative(a, &p).unwrap();
                assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-30), "k={k} n={n} a={a}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn lambert_examples() {
        assert_eq!(lambert_w(0.0).unwrap(), 0.0);
        assert!((lambert_w(E).unwrap() - 1.0).abs() < 1e-14);
        // Oracle: the fixed point of w = exp(-w).
        let mut w: f64 = 0.5;
        for _ in 0..200 {
            w = 0.5 * w + 0.5 * (-w).exp();
        }
        assert!((lambert_w(1.0).unwrap() - w).abs() < 1e-12);
        assert!((w - 0.567_143_290_4).abs() < 1e-10);
        assert!((lambert_w(-1.0 / E).unwrap() + 1.0).abs() < 1e-7);
        assert!(matches!(lambert_w(-0.5), Err(DdlError::Domain(_))));
    }

    #[test]
    fn lambert_defining_equation_on_log_grid() {
        for i in 0..=1200 {
            let z = 10f64.powf(-6.0 + 12.0 * i as f64 / 1200.0);
            let w = lambert_w(z).unwrap();
            assert!((w * w.exp() - z).abs() <= 1e-12 * z.max(1.0), "z={z}");
        }
        for i in 1..200 {
            let z = -1.0 / E + i as f64 * (1.0 / E) / 200.0;
            let w = lambert_w(z).unwrap();
            assert!(w >= -1.0);
            assert!((w * w.exp() - z).abs() <= 1e-12, "z={z}");
        }
    }

    #[test]
    fn optimal_alpha_properties() {
        let p = params(10, 1e8);
        let o = optimal_alpha(&p).unwrap();
        assert!(!o.saturated);
        assert!((o.closed_form / o.stationary - 1.0).abs() < 0.05, "{o:?}");

        for &(k, n) in &[(2, 1e3), (10, 1e4), (20, 1e5)] {
            let p = params(k, n);
            let a = optimal_alpha(&p).unwrap().stationary;
            let h = 1e-6 * a;
            let slope = (mse_unchecked(a + h, &p) - mse_unchecked(a - h, &p)) / (2.0 * h);
            assert!((slope * a / mse_unchecked(a, &p)).abs() < 1e-6);
        }

        let a4 = optimal_alpha(&params(10, 1e4)).unwrap();
        let a6 = optimal_alpha(&params(10, 1e6)).unwrap();
        assert!(a6.closed_form < a4.closed_form);
        assert!(a6.stationary < a4.stationary);

        // W(c)/c < 1 for every c > 0: tiny n pushes the closed form toward 1
        // without crossing it.
        let tiny = optimal_alpha(&params(20, 10.0)).unwrap();
        assert!(!tiny.saturated);
        assert!(tiny.closed_form > 0.98 && tiny.closed_form < 1.0, "{tiny:?}");
        assert!(tiny.stationary > 0.0 && tiny.stationary < 1.0);
    }

    #[test]
    fn optimal_alpha_grows_with_k() {
        let alphas: Vec<_> = [2, 4, 8, 16].iter().map(|&k| optimal_alpha(&params(k, 1e5)).unwrap()).collect();
        for w in alphas.windows(2) {
            assert!(w[0].closed_form < w[1].closed_form);
            assert!(w[0].stationary < w[1].stationary);
        }
    }

    #[test]
    fn single_sign_change_of_slope() {
        for &k in &[2, 5, 10, 20] {
            for &n in &[1e3, 1e4, 1e5] {
                let p = params(k, n);
                let signs: Vec<bool> =
                    (1..10_000).map(|i| derivative_unchecked(i as f64 / 10_000.0, &p) > 0.0).collect();
                let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
                assert_eq!(changes, 1, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn bias_term_examples() {
        assert!((ddl_bias_term(1000, 500, 2).unwrap() - 2.0 / 1000.0).abs() < 1e-15);
        assert_eq!(ddl_bias_term(1000, 500, 0).unwrap(), 0.0);
        assert!((ddl_bias_term(2000, 1000, 4).unwrap() - 0.002).abs() < 1e-15);
        assert!(ddl_bias_term(10, 10, 1).is_err());
        assert!(ddl_bias_term(10, 0, 1).is_err());
    }
}
