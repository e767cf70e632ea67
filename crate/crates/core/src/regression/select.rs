use serde::{Deserialize, Serialize};

use super::coding::{bayes_evidence_score, cv_fit, predictive_codelength, ridge_fit, two_part_mdl};
use super::oracle::oracle_generalization;
use crate::data::RegressionDataset;
use crate::discrete::DdlConfig;
use crate::error::{DdlError, Result};
use crate::report::{argmin_tiebreak, SelectionReport};
use crate::rng::{tags, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegCandidate {
    pub order: usize,
    pub lambda: f64,
}

/// Candidate grid: either ridge parameters at a fixed order, or orders
/// without regularization. Both are ordered simplest model first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegGrid {
    Lambda { order: usize, lambdas: Vec<f64> },
    Order { orders: Vec<usize> },
}

impl RegGrid {
    /// Order 20, ridge parameters `10^2, 10^1, ..., 10^-8` (strongest first).
    pub fn default_lambda() -> Self {
        RegGrid::Lambda { order: 20, lambdas: (-8..=2).rev().map(|e| 10f64.powi(e)).collect() }
    }

    /// Orders `0..=20`.
    pub fn default_order() -> Self {
        RegGrid::Order { orders: (0..=20).collect() }
    }

    pub fn candidates(&self) -> Vec<RegCandidate> {
        match self {
            RegGrid::Lambda { order, lambdas } => {
                lambdas.iter().map(|&lambda| RegCandidate { order: *order, lambda }).collect()
            }
            RegGrid::Order { orders } => orders.iter().map(|&order| RegCandidate { order, lambda: 0.0 }).collect(),
        }
    }

    /// The varied hyperparameter of each candidate.
    pub fn values(&self) -> Vec<f64> {
        match self {
            RegGrid::Lambda { lambdas, .. } => lambdas.clone(),
            RegGrid::Order { orders } => orders.iter().map(|&m| m as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RegGrid::Lambda { lambdas, .. } => lambdas.len(),
            RegGrid::Order { orders } => orders.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(DdlError::config("empty candidate grid"));
        }
        if let RegGrid::Lambda { lambdas, .. } = self {
            if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
                return Err(DdlError::config("ridge parameters must be finite and nonnegative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegMethod {
    /// Predictive codelength of the samples after `m = round(alpha n)`.
    Ddl { alpha: f64 },
    /// One random split holding out `holdout` of the samples.
    Cv { holdout: f64 },
    /// Two-part MDL; order grids only.
    Mdl,
    /// Bayesian evidence; ridge grids only.
    Bayes,
}

impl RegMethod {
    pub fn name(&self) -> &'static str {
        match self {
            RegMethod::Ddl { .. } => "ddl",
            RegMethod::Cv { .. } => "cv",
            RegMethod::Mdl => "mdl",
            RegMethod::Bayes => "bayes",
        }
    }
}

/// Scores every candidate with each method and records the choices and
/// their regret against the oracle error of each candidate's full-data fit.
///
/// Cross-validation adds a second row, `cv_split`, whose regret uses the
/// chosen candidate's training-split fit instead of its full-data refit;
/// that regret can be negative.
pub fn select(data: &RegressionDataset, grid: &RegGrid, methods: &[RegMethod], seed: Seed) -> Result<SelectionReport> {
    grid.validate()?;
    let candidates = grid.candidates();
    let nv = data.noise_variance();
    let oracle: Vec<f64> = candidates
        .iter()
        .map(|c| {
            let fit = ridge_fit(data, c.order, c.lambda)?;
            oracle_generalization(&fit.weights, fit.sigma2, nv)
        })
        .collect::<Result<_>>()?;
    let best = oracle.iter().copied().fold(f64::INFINITY, f64::min);
    let mut report = SelectionReport::new(grid.values(), oracle, seed.0)?;

    for method in methods {
        match *method {
            RegMethod::Ddl { alpha } => {
                let n = data.len();
                let scores = candidates
                    .iter()
                    .map(|c| {
                        let m = DdlConfig::alpha(alpha).with_min_prefix(super::min_prefix(c.order)).resolve(n)?;
                        Ok(predictive_codelength(data, c.order, c.lambda, m)?.total_bits / (n - m) as f64)
                    })
                    .collect::<Result<Vec<_>>>()?;
                report.add_method(method.name(), scores)?;
            }
            RegMethod::Cv { holdout } => {
                let split_seed = seed.derive(tags::CV_SPLIT);
                let fits = candidates
                    .iter()
                    .map(|c| cv_fit(data, c.order, c.lambda, holdout, split_seed))
                    .collect::<Result<Vec<_>>>()?;
                let scores: Vec<f64> = fits.iter().map(|(s, _)| *s).collect();
                let chosen = argmin_tiebreak(&scores)?;
                let split_fit = &fits[chosen].1;
                let split_regret = oracle_generalization(&split_fit.weights, split_fit.sigma2, nv)? - best;
                report.add_method(method.name(), scores.clone())?;
                report.add_method_with_regret("cv_split", scores, split_regret)?;
            }
            RegMethod::Mdl => {
                let RegGrid::Order { .. } = grid else {
                    return Err(DdlError::config("two-part MDL selects orders, not ridge parameters"));
                };
                let scores = candidates.iter().map(|c| two_part_mdl(data, c.order)).collect::<Result<Vec<_>>>()?;
                report.add_method(method.name(), scores)?;
            }
            RegMethod::Bayes => {
                let RegGrid::Lambda { order, lambdas } = grid else {
                    return Err(DdlError::config("the evidence selector needs a ridge-parameter grid"));
                };
                report.add_method(method.name(), bayes_evidence_score(data, *order, lambdas)?)?;
            }
        }
    }
    Ok(report)
}
