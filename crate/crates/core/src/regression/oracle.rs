use std::f64::consts::{LN_2, PI};

use super::poly_eval;
use crate::data::sine_target;
use crate::error::{DdlError, Result};

/// Default number of quadrature nodes (odd, for Simpson's rule).
pub const ORACLE_NODES: usize = 10_001;

/// Expected plug-in Gaussian log-loss in bits of the polynomial `weights`
/// with variance `sigma2` on fresh data `x ~ U[-2, 2]`,
/// `y = sin(3x) + N(0, noise_variance)`.
pub fn oracle_generalization(weights: &[f64], sigma2: f64, noise_variance: f64) -> Result<f64> {
    oracle_generalization_with_nodes(weights, sigma2, noise_variance, ORACLE_NODES)
}

pub fn oracle_generalization_with_nodes(
    weights: &[f64],
    sigma2: f64,
    noise_variance: f64,
    nodes: usize,
) -> Result<f64> {
    if sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(DdlError::config(format!("predictive variance {sigma2} must be positive")));
    }
    if nodes < 3 {
        return Err(DdlError::config("quadrature needs at least 3 nodes"));
    }
    // Composite Simpson on an even number of intervals.
    let intervals = if (nodes - 1).is_multiple_of(2) { nodes - 1 } else { nodes };
    let (a, b) = (-2.0, 2.0);
    let h = (b - a) / intervals as f64;
    let sq_err = |x: f64| {
        let r = sine_target(x) - poly_eval(weights, x);
        r * r
    };
    let mut acc = sq_err(a) + sq_err(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * sq_err(a + i as f64 * h);
    }
    let mean_sq_err = acc * h / 3.0 / (b - a);
    Ok(0.5 * (2.0 * PI * sigma2).log2() + (mean_sq_err + noise_variance) / (2.0 * sigma2 * LN_2))
}
