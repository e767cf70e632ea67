//! Block-sequential DDL for a one-hidden-layer binary classifier.
//!
//! Retraining for every prefix is out of reach for networks, so the suffix
//! is coded in blocks:
//!
//! 1. train on all `n` samples;
//! 2. starting from those weights, retrain on the first `m` samples only
//!    ("unlearning"): a few epochs at a high learning rate, then at a low one;
//! 3. for each suffix block, code its labels with the current model, then
//!    retrain on everything coded so far, with the new block duplicated up to
//!    the size of the existing training set.
//!
//! The labels of block `j` are scored by a model that saw only the prefix and
//! blocks before `j`, so the total is a valid sequential codelength given the
//! starting model.

mod coding;
mod mlp;
mod train;

pub use coding::{
    block_sequential_codelength, ddl_nn, select_lambda_nn, verify_causality, BlockPlan, NnDdl, NnSelectConfig,
};
pub use mlp::{mlp_forward, mlp_grad, mlp_loss, MlpParams, PROB_CLAMP};
pub use train::{sgd, train, unlearn, Phase, TrainSchedule};
