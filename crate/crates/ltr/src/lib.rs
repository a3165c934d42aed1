//! Learning to rank for expected exposure.
//!
//! A scorer (a small fully-connected network) is trained so that the
//! Plackett-Luce policy over its scores has low expected-exposure loss.
//! Rankings are sampled by Gumbel perturbation; ranks are relaxed with
//! pairwise sigmoids, and the exposure of each sample is computed on the
//! true ranks while gradients flow through the smooth ones.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checkpoint;
pub mod error;
pub mod evaluate;
pub mod objective;
pub mod optim;
pub mod scorer;
pub mod surrogate;
pub mod train;

pub use checkpoint::Checkpoint;
pub use error::{LtrError, Result};
pub use evaluate::{evaluate_trained, EvalSettings, Evaluation, FairnessView, GridPoint};
pub use objective::Objective;
pub use optim::OptimizerKind;
pub use scorer::Scorer;
pub use surrogate::ExposureMode;
pub use train::{train, TrainConfig, TrainReport};
