use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::mlp::{accumulate_grad, MlpParams};
use crate::data::ClassifDataset;
use crate::error::{DdlError, Result};
use crate::rng::Seed;

/// Learning rate and number of epochs of one training phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub lr: f64,
    pub epochs: usize,
}

/// Learning rates and epoch counts for the full training, the unlearning
/// phases and the block re-addition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSchedule {
    pub hidden: usize,
    pub train_lr: f64,
    pub train_epochs: usize,
    pub unlearn_high_lr: f64,
    pub unlearn_high_epochs: usize,
    pub unlearn_low_lr: f64,
    pub unlearn_low_epochs: usize,
    pub readd_epochs_per_block: usize,
    pub batch_size: usize,
    pub l2_lambda: f64,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        Self {
            hidden: 16,
            train_lr: 0.05,
            train_epochs: 40,
            unlearn_high_lr: 0.2,
            unlearn_high_epochs: 4,
            unlearn_low_lr: 0.05,
            unlearn_low_epochs: 4,
            readd_epochs_per_block: 1,
            batch_size: 32,
            l2_lambda: 0.0,
        }
    }
}

impl TrainSchedule {
    pub fn with_lambda(mut self, l2_lambda: f64) -> Self {
        self.l2_lambda = l2_lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.train_lr, self.unlearn_high_lr, self.unlearn_low_lr];
        if rates.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(DdlError::config("learning rates must be positive"));
        }
        if self.batch_size == 0 || self.hidden == 0 {
            return Err(DdlError::config("batch size and hidden width must be positive"));
        }
        if !self.l2_lambda.is_finite() || self.l2_lambda < 0.0 {
            return Err(DdlError::config(format!("L2 parameter {} must be nonnegative", self.l2_lambda)));
        }
        Ok(())
    }

    pub fn train_phase(&self) -> Phase {
        Phase { lr: self.train_lr, epochs: self.train_epochs }
    }
}

/// Plain minibatch gradient descent over the samples `idx` of `data`,
/// reshuffled every epoch from `seed`.
pub(crate) fn sgd_indices(
    mut params: MlpParams,
    data: &ClassifDataset,
    idx: &[usize],
    phase: Phase,
    batch_size: usize,
    l2_lambda: f64,
    seed: Seed,
) -> Result<MlpParams> {
    if idx.is_empty() || phase.epochs == 0 {
        return Ok(params);
    }
    if data.dim() != params.dim() {
        return Err(DdlError::config(format!(
            "data of dimension {} for a network of dimension {}",
            data.dim(),
            params.dim()
        )));
    }
    let mut order = idx.to_vec();
    let mut rng = seed.rng();
    let mut grad = vec![0.0; params.flat().len()];
    for epoch in 0..phase.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(batch_size.max(1)) {
            accumulate_grad(&params, data, batch, l2_lambda, &mut grad);
            for (p, g) in params.flat_mut().iter_mut().zip(&grad) {
                *p -= phase.lr * g;
            }
        }
        if !params.is_finite() {
            return Err(DdlError::computation(format!(
                "training diverged in epoch {epoch} at learning rate {} (lambda {l2_lambda}, {} samples)",
                phase.lr,
                idx.len()
            )));
        }
    }
    Ok(params)
}

/// Minibatch gradient descent on all of `data`.
pub fn sgd(
    params: MlpParams,
    data: &ClassifDataset,
    phase: Phase,
    batch_size: usize,
    l2_lambda: f64,
    seed: Seed,
) -> Result<MlpParams> {
    let idx: Vec<usize> = (0..data.len()).collect();
    sgd_indices(params, data, &idx, phase, batch_size, l2_lambda, seed)
}

/// Full training phase of `schedule`.
pub fn train(params: MlpParams, data: &ClassifDataset, schedule: &TrainSchedule, seed: Seed) -> Result<MlpParams> {
    schedule.validate()?;
    sgd(params, data, schedule.train_phase(), schedule.batch_size, schedule.l2_lambda, seed)
}

/// Retrains `params_n` on `prefix` alone: a high learning-rate phase to move
/// away from the suffix, then a low one to settle on the prefix.
pub fn unlearn(
    params_n: &MlpParams,
    prefix: &ClassifDataset,
    schedule: &TrainSchedule,
    seed: Seed,
) -> Result<MlpParams> {
    schedule.validate()?;
    let high = Phase { lr: schedule.unlearn_high_lr, epochs: schedule.unlearn_high_epochs };
    let low = Phase { lr: schedule.unlearn_low_lr, epochs: schedule.unlearn_low_epochs };
    let p = sgd(params_n.clone(), prefix, high, schedule.batch_size, schedule.l2_lambda, seed.derive(0))?;
    sgd(p, prefix, low, schedule.batch_size, schedule.l2_lambda, seed.derive(1))
}
