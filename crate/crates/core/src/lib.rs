//! Expected-exposure evaluation for stochastic ranking policies.
//!
//! A system is evaluated as a distribution over rankings. Each document's
//! expected exposure under a browsing model (RBP or ERR) is compared with
//! the exposure it would receive from an oracle that shuffles documents
//! uniformly within relevance grades. The squared error between the two
//! decomposes into a disparity term and a relevance term; sweeping a
//! policy's randomization parameter traces a disparity-relevance curve whose
//! area (EE-AUC) summarizes the tradeoff.
//!
//! Module map:
//!
//! - [`judgments`], [`model`], [`ranking`], [`exposure`]: data model and
//!   exposure computation (per-ranking, Monte Carlo, closed-form target,
//!   exact enumeration).
//! - [`metrics`]: EE-L/EE-D/EE-R, curve normalization and EE-AUC, static
//!   RBP/ERR, generalized entropy, group fairness and intent-aware RBP.
//! - [`policies`]: deterministic, Plackett-Luce, rank-transposition and
//!   oracle policies, plus parameter sweeps.
//! - [`io`]: TREC run/qrels, SVMlight features, group files, CSV results.
//! - [`dataset`], [`synth`]: learning-to-rank data and synthetic generators.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod exposure;
pub mod io;
pub mod judgments;
pub mod metrics;
pub mod model;
pub mod perm;
pub mod policies;
pub mod ranking;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use exposure::{
    exact_expected_exposure, expected_exposure_mc, ranking_exposure, target_exposure,
    uniform_expected_exposure, ExposureVector, DEFAULT_ENUMERATION_CAP,
};
pub use judgments::RelevanceJudgments;
pub use metrics::{ee_auc, ee_breakdown, EEBreakdown, SweepCurve, SweepPoint};
pub use model::{BrowsingModel, ModelKind, StopMap};
pub use policies::{Policy, PolicyFamily, ScoredRun};
pub use ranking::Ranking;
