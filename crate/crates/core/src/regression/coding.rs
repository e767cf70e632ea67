use rand::seq::SliceRandom;
use std::f64::consts::{LN_2, PI};

use super::rls::RlsState;
use super::{scaled_features, scaled_penalty, unscale_weights, COLUMN_SCALE};
use crate::data::RegressionDataset;
use crate::discrete::CodelengthTrace;
use crate::error::{DdlError, Result};
use crate::rng::Seed;

/// Floor on every plug-in noise variance.
pub const SIGMA2_MIN: f64 = 1e-6;

/// Smallest prefix the predictive coder accepts for a polynomial of `order`.
pub fn min_prefix(order: usize) -> usize {
    (order + 1 + 5).max(10)
}

/// `-log2 N(y; mean, sigma2)`.
pub fn gaussian_bits(y: f64, mean: f64, sigma2: f64) -> f64 {
    let r = y - mean;
    0.5 * (2.0 * PI * sigma2).log2() + r * r / (2.0 * sigma2 * LN_2)
}

fn plug_in_variance(rss: f64, count: usize, dim: usize) -> f64 {
    let dof = count.saturating_sub(dim).max(1);
    (rss / dof as f64).max(SIGMA2_MIN)
}

/// A ridge fit of a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    /// Coefficients of `(1, x, ..., x^order)`.
    pub weights: Vec<f64>,
    /// In-sample residual sum of squares.
    pub rss: f64,
    /// `rss + lambda |w|²`.
    pub objective: f64,
    pub count: usize,
    /// Plug-in noise variance `rss / (count - d)`, floored at [`SIGMA2_MIN`].
    pub sigma2: f64,
    /// `ln det(XᵀX + lambda I)` in the raw basis.
    pub log_det_gram: f64,
}

fn fit_state(
    data: &RegressionDataset,
    indices: impl Iterator<Item = usize>,
    order: usize,
    lambda: f64,
) -> Result<RlsState> {
    let mut state = RlsState::with_penalty(scaled_penalty(order, lambda))?;
    for i in indices {
        state.update(&scaled_features(data.inputs()[i], order), data.targets()[i])?;
    }
    Ok(state)
}

fn fit_from_state(state: &RlsState, order: usize) -> Result<Fit> {
    let d = order + 1;
    let scaled = state.weights().ok_or_else(|| {
        DdlError::computation(format!("singular Gram matrix for order {order} with {} samples", state.count()))
    })?;
    let r = state.factor();
    let log_det_scaled: f64 = (0..d).map(|j| 2.0 * r[j * d + j].abs().ln()).sum();
    let log_scale: f64 = (0..d).map(|j| j as f64 * COLUMN_SCALE.ln()).sum();
    let rss = state.rss();
    Ok(Fit {
        weights: unscale_weights(scaled),
        rss,
        objective: state.objective(),
        count: state.count(),
        sigma2: plug_in_variance(rss, state.count(), d),
        log_det_gram: log_det_scaled - 2.0 * log_scale,
    })
}

/// Ridge fit on all samples.
pub fn ridge_fit(data: &RegressionDataset, order: usize, lambda: f64) -> Result<Fit> {
    let state = fit_state(data, 0..data.len(), order, lambda)?;
    fit_from_state(&state, order)
}

/// Sequential plug-in Gaussian codelength of samples `m+1..=n`: sample `i+1`
/// is coded with the ridge fit and plug-in variance of samples `1..=i`.
pub fn predictive_codelength(data: &RegressionDataset, order: usize, lambda: f64, m: usize) -> Result<CodelengthTrace> {
    let n = data.len();
    let floor = min_prefix(order);
    if m < floor {
        return Err(DdlError::config(format!("prefix {m} below the minimum {floor} for order {order}")));
    }
    if m > n {
        return Err(DdlError::config(format!("prefix {m} beyond {n} samples")));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(DdlError::config(format!("ridge parameter {lambda} must be finite and nonnegative")));
    }
    let d = order + 1;
    let mut state = fit_state(data, 0..m, order, lambda)?;
    let mut bits = Vec::with_capacity(n - m);
    for i in m..n {
        let phi = scaled_features(data.inputs()[i], order);
        let mean = state
            .predict(&phi)
            .ok_or_else(|| DdlError::computation(format!("singular Gram matrix after {i} samples")))?;
        let sigma2 = plug_in_variance(state.rss(), state.count(), d);
        bits.push(gaussian_bits(data.targets()[i], mean, sigma2));
        state.update(&phi, data.targets()[i])?;
    }
    Ok(CodelengthTrace::new(m, bits))
}

/// Fit and penalty terms of the two-part codelength.
pub fn two_part_mdl_terms(data: &RegressionDataset, order: usize) -> Result<(f64, f64)> {
    let n = data.len();
    let d = order + 1;
    if n <= d {
        return Err(DdlError::config(format!("{n} samples cannot fit {d} coefficients")));
    }
    let fit = ridge_fit(data, order, 0.0)?;
    let sigma2 = (fit.rss / n as f64).max(SIGMA2_MIN);
    let fit_bits = 0.5 * n as f64 * (2.0 * PI * sigma2).log2() + fit.rss / (2.0 * sigma2 * LN_2);
    let penalty_bits = 0.5 * d as f64 * (n as f64).log2();
    Ok((fit_bits, penalty_bits))
}

/// `-log2 P(y | x; ML fit) + (d/2) log2 n` with `d = order + 1`.
pub fn two_part_mdl(data: &RegressionDataset, order: usize) -> Result<f64> {
    let (fit, penalty) = two_part_mdl_terms(data, order)?;
    Ok(fit + penalty)
}

/// Single random split: fit on the training part, return the mean plug-in
/// Gaussian bits on the held-out part and the training fit.
pub fn cv_fit(
    data: &RegressionDataset,
    order: usize,
    lambda: f64,
    holdout_fraction: f64,
    seed: Seed,
) -> Result<(f64, Fit)> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(DdlError::config(format!("holdout fraction {holdout_fraction} outside (0, 1)")));
    }
    let n = data.len();
    let holdout = ((holdout_fraction * n as f64).round() as usize).max(1);
    let train = n.saturating_sub(holdout);
    if train < min_prefix(order) {
        return Err(DdlError::config(format!(
            "{train} training samples after holding out {holdout}; order {order} needs {}",
            min_prefix(order)
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed.rng());
    let state = fit_state(data, idx[..train].iter().copied(), order, lambda)?;
    let fit = fit_from_state(&state, order)?;
    let total: f64 = idx[train..]
        .iter()
        .map(|&i| {
            let mean = super::poly_eval(&fit.weights, data.inputs()[i]);
            gaussian_bits(data.targets()[i], mean, fit.sigma2)
        })
        .sum();
    Ok((total / holdout as f64, fit))
}

/// Mean held-out bits of a single `1 - holdout_fraction` / `holdout_fraction` split.
pub fn cv_score(data: &RegressionDataset, order: usize, lambda: f64, holdout_fraction: f64, seed: Seed) -> Result<f64> {
    Ok(cv_fit(data, order, lambda, holdout_fraction, seed)?.0)
}

/// `log2` marginal likelihood of the Gaussian linear model with prior
/// precision `alpha = lambda beta` and noise precision `beta = n / rss`
/// taken from the ridge fit.
pub fn bayes_log_evidence(data: &RegressionDataset, order: usize, lambda: f64) -> Result<f64> {
    let n = data.len();
    let d = order + 1;
    if n <= d {
        return Err(DdlError::config(format!("{n} samples cannot fit {d} coefficients")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(DdlError::config(format!("evidence needs a positive ridge parameter, got {lambda}")));
    }
    let fit = ridge_fit(data, order, lambda)?;
    if !fit.log_det_gram.is_finite() {
        return Err(DdlError::computation(format!("posterior covariance not positive definite at lambda {lambda}")));
    }
    let nf = n as f64;
    let beta = nf / fit.rss.max(nf * SIGMA2_MIN);
    let alpha = lambda * beta;
    let df = d as f64;
    let ln_evidence = 0.5 * df * alpha.ln() + 0.5 * nf * beta.ln()
        - 0.5 * beta * fit.objective
        - 0.5 * (df * beta.ln() + fit.log_det_gram)
        - 0.5 * nf * (2.0 * PI).ln();
    Ok(ln_evidence / LN_2)
}

/// Negated `log2` evidence for each ridge parameter, so that smaller is better.
pub fn bayes_evidence_score(data: &RegressionDataset, order: usize, lambdas: &[f64]) -> Result<Vec<f64>> {
    lambdas.iter().map(|&l| bayes_log_evidence(data, order, l).map(|e| -e)).collect()
}
