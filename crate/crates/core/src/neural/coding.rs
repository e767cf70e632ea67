use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::mlp::MlpParams;
use super::train::{sgd_indices, train, unlearn, TrainSchedule};
use crate::data::ClassifDataset;
use crate::discrete::CodelengthTrace;
use crate::error::{DdlError, Result};
use crate::report::SelectionReport;
use crate::rng::{tags, Seed};

/// Split point and suffix block boundaries `m = b_0 < b_1 < ... < b_B = n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPlan {
    boundaries: Vec<usize>,
}

impl BlockPlan {
    /// `blocks` nearly equal blocks covering `m..n`; earlier blocks take the
    /// remainder.
    pub fn new(n: usize, m: usize, blocks: usize) -> Result<Self> {
        if m == 0 || m >= n {
            return Err(DdlError::config(format!("split point m = {m} must satisfy 0 < m < n = {n}")));
        }
        if blocks == 0 || blocks > n - m {
            return Err(DdlError::config(format!("{blocks} blocks cannot tile {} suffix samples", n - m)));
        }
        let len = n - m;
        let (base, extra) = (len / blocks, len % blocks);
        let mut boundaries = vec![m];
        let mut at = m;
        for j in 0..blocks {
            at += base + usize::from(j < extra);
            boundaries.push(at);
        }
        Ok(Self { boundaries })
    }

    /// `m = round(alpha n)`.
    pub fn from_alpha(n: usize, alpha: f64, blocks: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(DdlError::config(format!("split fraction {alpha} outside (0, 1)")));
        }
        Self::new(n, (alpha * n as f64).round() as usize, blocks)
    }

    pub fn m(&self) -> usize {
        self.boundaries[0]
    }

    pub fn n(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    pub fn block_count(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn block(&self, j: usize) -> std::ops::Range<usize> {
        self.boundaries[j]..self.boundaries[j + 1]
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Copies of a new block of `block_size` samples added to a training set
    /// of `current` samples: enough to roughly match its size, at least one.
    pub fn duplication_factor(current: usize, block_size: usize) -> usize {
        (current / block_size.max(1)).max(1)
    }
}

/// Codes the suffix blocks of `data` starting from the prefix model `start`.
/// Block `j` is scored by the model retrained on the prefix and blocks
/// `< j`, so its bits never depend on later samples.
pub fn block_sequential_codelength(
    start: &MlpParams,
    data: &ClassifDataset,
    plan: &BlockPlan,
    schedule: &TrainSchedule,
    seed: Seed,
) -> Result<CodelengthTrace> {
    schedule.validate()?;
    if plan.n() != data.len() {
        return Err(DdlError::config(format!("plan covers {} samples, data has {}", plan.n(), data.len())));
    }
    let mut params = start.clone();
    let mut seen: Vec<usize> = (0..plan.m()).collect();
    let mut bits = Vec::with_capacity(plan.n() - plan.m());
    let last = plan.block_count() - 1;
    for j in 0..plan.block_count() {
        let block = plan.block(j);
        for i in block.clone() {
            bits.push(params.label_bits(&data.inputs()[i], data.labels()[i]));
        }
        if j == last {
            break;
        }
        let copies = BlockPlan::duplication_factor(seen.len(), block.len());
        let mut train_idx = seen.clone();
        for _ in 0..copies {
            train_idx.extend(block.clone());
        }
        let phase = super::Phase { lr: schedule.train_lr, epochs: schedule.readd_epochs_per_block };
        params = sgd_indices(
            params,
            data,
            &train_idx,
            phase,
            schedule.batch_size,
            schedule.l2_lambda,
            seed.derive(j as u64),
        )?;
        seen.extend(block);
    }
    Ok(CodelengthTrace::new(plan.m(), bits))
}

/// Recodes `data` with every block after `j` altered (labels flipped,
/// inputs reversed) and checks that blocks up to `j` keep bit-identical
/// codelengths.
pub fn verify_causality(
    start: &MlpParams,
    data: &ClassifDataset,
    plan: &BlockPlan,
    schedule: &TrainSchedule,
    seed: Seed,
) -> Result<()> {
    let reference = block_sequential_codelength(start, data, plan, schedule, seed)?;
    for j in 0..plan.block_count() - 1 {
        let cut = plan.block(j).end;
        let mut inputs = data.inputs().to_vec();
        let mut labels = data.labels().to_vec();
        for i in cut..data.len() {
            inputs[i].reverse();
            labels[i] ^= 1;
        }
        let altered = ClassifDataset::new(inputs, labels)?;
        let trace = block_sequential_codelength(start, &altered, plan, schedule, seed)?;
        let k = cut - plan.m();
        let same = reference.per_sample_bits[..k]
            .iter()
            .zip(&trace.per_sample_bits[..k])
            .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            return Err(DdlError::computation(format!(
                "codelength of blocks up to {j} changed when later samples were altered"
            )));
        }
    }
    Ok(())
}

/// Intermediate and final results of one DDL evaluation.
#[derive(Debug, Clone)]
pub struct NnDdl {
    pub trace: CodelengthTrace,
    /// Mean bits per coded sample.
    pub score_bits: f64,
    /// Model trained on all samples.
    pub full_model: MlpParams,
    /// Model after unlearning the suffix.
    pub prefix_model: MlpParams,
}

/// Full pipeline: train from `init` on all of `data`, unlearn the suffix,
/// then code the suffix block by block.
pub fn ddl_nn(
    init: &MlpParams,
    data: &ClassifDataset,
    plan: &BlockPlan,
    schedule: &TrainSchedule,
    seed: Seed,
) -> Result<NnDdl> {
    let full_model = train(init.clone(), data, schedule, seed.derive(tags::SHUFFLE))?;
    let prefix = data.range(0..plan.m());
    let prefix_model = unlearn(&full_model, &prefix, schedule, seed.derive(tags::SHUFFLE + 100))?;
    let trace = block_sequential_codelength(&prefix_model, data, plan, schedule, seed.derive(tags::SHUFFLE + 200))?;
    let score_bits = trace.mean_bits();
    Ok(NnDdl { trace, score_bits, full_model, prefix_model })
}

/// Settings of the ridge-parameter selection experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnSelectConfig {
    /// Ordered strongest regularization first.
    pub lambdas: Vec<f64>,
    pub alpha: f64,
    pub blocks: usize,
    pub cv_holdout: f64,
    pub schedule: TrainSchedule,
}

impl Default for NnSelectConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![0.1, 0.03, 0.01, 0.003, 0.001, 0.0],
            alpha: 0.8,
            blocks: 5,
            cv_holdout: 0.2,
            schedule: TrainSchedule::default(),
        }
    }
}

/// Scores each ridge parameter by DDL and by a single holdout split, and
/// measures regret with the mean bits of each full-data model on `test`.
pub fn select_lambda_nn(
    data: &ClassifDataset,
    test: &ClassifDataset,
    cfg: &NnSelectConfig,
    seed: Seed,
) -> Result<SelectionReport> {
    if cfg.lambdas.is_empty() {
        return Err(DdlError::config("empty ridge-parameter grid"));
    }
    if !(cfg.cv_holdout > 0.0 && cfg.cv_holdout < 1.0) {
        return Err(DdlError::config(format!("holdout fraction {} outside (0, 1)", cfg.cv_holdout)));
    }
    if test.is_empty() || test.dim() != data.dim() {
        return Err(DdlError::config("test set is empty or has the wrong dimension"));
    }
    let n = data.len();
    let plan = BlockPlan::from_alpha(n, cfg.alpha, cfg.blocks)?;
    let init = MlpParams::random(data.dim(), cfg.schedule.hidden, seed.derive(tags::INIT));

    let holdout = ((cfg.cv_holdout * n as f64).round() as usize).clamp(1, n - 1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed.derive(tags::CV_SPLIT).rng());
    let cv_train = data.select(&idx[holdout..]);
    let cv_test = data.select(&idx[..holdout]);

    let mut ddl_scores = Vec::with_capacity(cfg.lambdas.len());
    let mut cv_scores = Vec::with_capacity(cfg.lambdas.len());
    let mut oracle = Vec::with_capacity(cfg.lambdas.len());
    for &lambda in &cfg.lambdas {
        let schedule = cfg.schedule.with_lambda(lambda);
        let ddl = ddl_nn(&init, data, &plan, &schedule, seed)?;
        oracle.push(ddl.full_model.mean_bits(test));
        ddl_scores.push(ddl.score_bits);
        let cv_model = train(init.clone(), &cv_train, &schedule, seed.derive(tags::SHUFFLE))?;
        cv_scores.push(cv_model.mean_bits(&cv_test));
    }
    let mut report = SelectionReport::new(cfg.lambdas.clone(), oracle, seed.0)?;
    report.add_method("ddl", ddl_scores)?;
    report.add_method("cv", cv_scores)?;
    Ok(report)
}
