//! Differential description length (DDL).
//!
//! DDL estimates the generalization error of a learner from its training set
//! alone: code the training labels with a universal sequential coder, and
//! take the per-sample codelength of the last `n - m` samples,
//!
//! ```text
//! DDL = (C(n) - C(m)) / (n - m)      [bits / sample]
//! ```
//!
//! The crate provides the coders and selectors for three task families:
//!
//! * [`discrete`]: K-symbol features with binary labels; KT sequential coder,
//!   exact enumerative block coder, DDL estimate, true generalization error,
//!   and the two-model (independent vs. dependent) selection experiment.
//! * [`regression`]: polynomial regression coded with recursive least squares;
//!   DDL, cross-validation, two-part MDL and Bayesian evidence selectors.
//! * [`neural`]: a one-hidden-layer classifier coded block-sequentially after
//!   warm-start unlearning.
//!
//! [`analysis`] holds the closed-form error model for the split fraction
//! `alpha = m / n` and the Lambert W solver it needs.
//!
//! All exposed codelengths and losses are in bits.

#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod data;
pub mod discrete;
pub mod error;
pub mod neural;
pub mod regression;
pub mod report;
pub mod rng;

pub use data::{gen_bernoulli_k, gen_sine, ClassifDataset, DiscreteDataset, RegressionDataset};
pub use discrete::{CodelengthTrace, DdlConfig, KtState, Split};
pub use error::{DdlError, Result};
pub use report::{argmin_tiebreak, regret, spearman, MethodResult, SelectionReport};
pub use rng::Seed;
