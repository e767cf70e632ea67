//! Polynomial regression coded sequentially with recursive least squares,
//! and the selectors compared against DDL: single-split cross-validation,
//! two-part MDL, and Bayesian evidence.
//!
//! Continuous labels are scored with a plug-in Gaussian density; the
//! "codelength" is therefore a differential quantity defined up to a
//! quantization constant that cancels in differences and argmins. Per-sample
//! values may be negative.

mod coding;
mod oracle;
mod rls;
mod select;

pub use coding::{
    bayes_evidence_score, bayes_log_evidence, cv_fit, cv_score, gaussian_bits, min_prefix, predictive_codelength,
    ridge_fit, two_part_mdl, Fit, SIGMA2_MIN,
};
pub use oracle::{oracle_generalization, oracle_generalization_with_nodes, ORACLE_NODES};
pub use rls::RlsState;
pub use select::{select, RegCandidate, RegGrid, RegMethod};

/// `(1, x, x², ..., x^order)`.
pub fn poly_features(x: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut p = 1.0;
    for _ in 0..=order {
        out.push(p);
        p *= x;
    }
    out
}

/// Inputs live in `[-2, 2]`; internally the basis is `(x/2)^j`, which spans
/// the same model with columns bounded by 1. Coefficient `j` of the raw basis
/// is the scaled coefficient times `COLUMN_SCALE^j`.
pub(crate) const COLUMN_SCALE: f64 = 0.5;

pub(crate) fn scaled_features(x: f64, order: usize) -> Vec<f64> {
    poly_features(COLUMN_SCALE * x, order)
}

/// Ridge penalty `lambda |w|²` on raw coefficients expressed in the scaled basis.
pub(crate) fn scaled_penalty(order: usize, lambda: f64) -> Vec<f64> {
    (0..=order).map(|j| lambda * COLUMN_SCALE.powi(2 * j as i32)).collect()
}

pub(crate) fn unscale_weights(scaled: &[f64]) -> Vec<f64> {
    scaled.iter().enumerate().map(|(j, v)| v * COLUMN_SCALE.powi(j as i32)).collect()
}

/// Evaluates the raw-basis polynomial with Horner's rule.
pub fn poly_eval(weights: &[f64], x: f64) -> f64 {
    weights.iter().rev().fold(0.0, |acc, w| acc * x + w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_examples() {
        assert_eq!(poly_features(0.0, 3), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(poly_features(2.0, 2), vec![1.0, 2.0, 4.0]);
        assert_eq!(poly_features(-1.0, 4), vec![1.0, -1.0, 1.0, -1.0, 1.0]);
        assert_eq!(poly_features(3.0, 0), vec![1.0]);
    }

    #[test]
    fn scaling_round_trip() {
        let v = [0.5, -1.0, 2.0, 0.25];
        let w = unscale_weights(&v);
        let x = 1.3;
        let scaled: f64 = scaled_features(x, 3).iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!((poly_eval(&w, x) - scaled).abs() < 1e-12);
    }
}
