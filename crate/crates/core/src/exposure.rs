//! Exposure of documents under a browsing model.
//!
//! Four routes to an exposure vector:
//!
//! - [`ranking_exposure`]: one fixed ranking.
//! - [`expected_exposure_mc`]: Monte Carlo average over rankings sampled
//!   from a policy.
//! - [`target_exposure`]: closed form for the oracle policy that shuffles
//!   documents uniformly within grades.
//! - [`exact_expected_exposure`]: exact expectation by enumerating a small
//!   policy's support; this is the test oracle for the other three.

use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::judgments::RelevanceJudgments;
use crate::model::BrowsingModel;
use crate::policies::Policy;
use crate::ranking::Ranking;
use crate::rng::StreamRng;

/// Largest pool for which exact enumeration is attempted by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Nonnegative attention mass per pool document, indexed like the pool.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureVector {
    values: Vec<f64>,
}

impl ExposureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidExposure(bad));
        }
        Ok(ExposureVector { values })
    }

    pub fn zeros(n: usize) -> Self {
        ExposureVector {
            values: vec![0.0; n],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Exposure of a document by id; `None` if it is not in the pool.
    pub fn of(&self, judgments: &RelevanceJudgments, doc: &str) -> Option<f64> {
        judgments.index_of(doc).map(|i| self.values[i])
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn dot(&self, other: &ExposureVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Dimension {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum())
    }
}

/// Adds `scale` times the exposure of `order` into `out`.
pub(crate) fn accumulate_exposure(
    model: &BrowsingModel,
    order: &[usize],
    judgments: &RelevanceJudgments,
    scale: f64,
    out: &mut [f64],
) -> Result<()> {
    let grades = judgments.grades();
    let gamma = model.gamma();
    let mut reach = 1.0;
    for (rank, &d) in order.iter().enumerate() {
        if !model.within_depth(rank) {
            break;
        }
        let Some(&grade) = grades.get(d) else {
            return Err(Error::JudgmentMismatch {
                query: judgments.query_id().to_string(),
                doc: format!("#{d}"),
            });
        };
        out[d] += scale * reach;
        reach *= gamma * model.continuation(grade);
    }
    Ok(())
}

/// Exposure each pool document receives from a single ranking.
///
/// RBP: `γ^rank`. ERR: `γ^rank · Π_{j<rank} (1 − φ(grade(σ_j)))`. Zero at ranks
/// `≥ δ` and for documents the ranking omits.
pub fn ranking_exposure(
    model: &BrowsingModel,
    ranking: &Ranking,
    judgments: &RelevanceJudgments,
) -> Result<ExposureVector> {
    let mut out = vec![0.0; judgments.len()];
    accumulate_exposure(model, ranking.order(), judgments, 1.0, &mut out)?;
    Ok(ExposureVector { values: out })
}

/// Mean exposure over `n_samples` rankings drawn from `policy` with a
/// generator seeded by `seed`.
pub fn expected_exposure_mc(
    policy: &Policy,
    model: &BrowsingModel,
    judgments: &RelevanceJudgments,
    n_samples: usize,
    seed: u64,
) -> Result<ExposureVector> {
    let mut rng = StreamRng::seed_from_u64(seed);
    expected_exposure_with_rng(policy, model, judgments, n_samples, &mut rng)
}

pub fn expected_exposure_with_rng<R: rand::Rng + ?Sized>(
    policy: &Policy,
    model: &BrowsingModel,
    judgments: &RelevanceJudgments,
    n_samples: usize,
    rng: &mut R,
) -> Result<ExposureVector> {
    if n_samples == 0 {
        return Err(Error::Configuration("n_samples must be positive".into()));
    }
    if let Policy::Deterministic(ranking) = policy {
        // a point mass: the mean is the ranking's own exposure, bit for bit
        return ranking_exposure(model, ranking, judgments);
    }
    let mut out = vec![0.0; judgments.len()];
    let scale = 1.0 / n_samples as f64;
    for _ in 0..n_samples {
        let ranking = policy.sample(rng);
        accumulate_exposure(model, ranking.order(), judgments, scale, &mut out)?;
    }
    Ok(ExposureVector { values: out })
}

/// Expected exposure under the oracle policy (uniform over grade-sorted
/// permutations), in closed form.
///
/// The block of grade `g` occupies ranks `[m_{>g}, m_{>g} + m_g)`. Entering
/// the block with reach `P_g`, the `k`-th slot has exposure `P_g q^k` where
/// `q = γ(1 − φ(g))` (`q = γ` under RBP), so each document gets the average
/// `P_g (1 − q^K) / (m_g (1 − q))` with `K` the number of slots above depth.
pub fn target_exposure(
    model: &BrowsingModel,
    judgments: &RelevanceJudgments,
) -> Result<ExposureVector> {
    if judgments.is_empty() {
        return Err(Error::Configuration(format!(
            "query `{}` has an empty pool",
            judgments.query_id()
        )));
    }
    let counts = judgments.grade_counts();
    let n = judgments.len();
    let visible = model.visible_positions(n);
    let mut per_grade = vec![0.0; counts.len()];
    let mut start = 0usize;
    let mut reach = 1.0;
    for g in (0..counts.len()).rev() {
        let m = counts[g];
        if m == 0 {
            continue;
        }
        let q = model.gamma() * model.continuation(g as u32);
        let slots = visible.saturating_sub(start).min(m);
        per_grade[g] = reach * (1.0 - q.powi(slots as i32)) / (m as f64 * (1.0 - q));
        reach *= q.powi(m as i32);
        start += m;
    }
    let values = judgments
        .grades()
        .iter()
        .map(|&g| per_grade[g as usize])
        .collect();
    Ok(ExposureVector { values })
}

/// Expected exposure under a policy that picks a uniformly random permutation
/// of the whole pool, computed exactly.
///
/// A document at uniform rank `r` is preceded by a uniform `r`-subset of the
/// other documents; the mean continuation product over such subsets is
/// tracked incrementally, which keeps the recursion free of binomial overflow.
pub fn uniform_expected_exposure(
    model: &BrowsingModel,
    judgments: &RelevanceJudgments,
) -> ExposureVector {
    let n = judgments.len();
    if n == 0 {
        return ExposureVector::zeros(0);
    }
    let visible = model.visible_positions(n);
    let grades = judgments.grades();
    let weights = model.position_weights(n);
    let mut per_grade = vec![f64::NAN; judgments.max_grade() as usize + 1];
    for d in 0..n {
        let g = grades[d] as usize;
        if !per_grade[g].is_nan() {
            continue;
        }
        let mut mean_prod = vec![0.0; visible];
        mean_prod[0] = 1.0;
        let mut seen = 0usize;
        for (j, &gj) in grades.iter().enumerate() {
            if j == d {
                continue;
            }
            let c = model.continuation(gj);
            seen += 1;
            let nf = seen as f64;
            for k in (1..=seen.min(visible - 1)).rev() {
                let kf = k as f64;
                mean_prod[k] = (nf - kf) / nf * mean_prod[k] + kf / nf * c * mean_prod[k - 1];
            }
        }
        let total: f64 = weights.iter().zip(&mean_prod).map(|(w, p)| w * p).sum();
        per_grade[g] = total / n as f64;
    }
    ExposureVector {
        values: grades.iter().map(|&g| per_grade[g as usize]).collect(),
    }
}

/// Exact expected exposure by summing over the policy's support, using
/// [`DEFAULT_ENUMERATION_CAP`].
pub fn exact_expected_exposure(
    policy: &Policy,
    model: &BrowsingModel,
    judgments: &RelevanceJudgments,
) -> Result<ExposureVector> {
    exact_expected_exposure_capped(policy, model, judgments, DEFAULT_ENUMERATION_CAP)
}

pub fn exact_expected_exposure_capped(
    policy: &Policy,
    model: &BrowsingModel,
    judgments: &RelevanceJudgments,
    cap: usize,
) -> Result<ExposureVector> {
    if judgments.len() > cap {
        return Err(Error::EnumerationCap {
            pool: judgments.len(),
            cap,
        });
    }
    let support = policy.support(cap)?;
    let total: f64 = support.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::PolicyIntegrity(total));
    }
    let mut out = vec![0.0; judgments.len()];
    for (ranking, p) in &support {
        accumulate_exposure(model, ranking.order(), judgments, *p, &mut out)?;
    }
    Ok(ExposureVector { values: out })
}
