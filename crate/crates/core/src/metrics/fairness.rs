//! Group-level exposure metrics and intent-aware RBP.

use std::fmt;
use std::str::FromStr;

use super::{breakdown_of, EEBreakdown};
use crate::error::{Error, Result};
use crate::exposure::{uniform_expected_exposure, ExposureVector};
use crate::judgments::RelevanceJudgments;
use crate::model::BrowsingModel;
use crate::ranking::Ranking;

/// Binary document-to-group matrix `A`, stored as per-document group lists.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAttribution {
    memberships: Vec<Vec<usize>>,
    group_ids: Vec<String>,
}

impl GroupAttribution {
    /// Every document needs at least one group and group indices must be in
    /// range.
    pub fn new(memberships: Vec<Vec<usize>>, group_ids: Vec<String>) -> Result<Self> {
        if group_ids.is_empty() {
            return Err(Error::Configuration("no groups defined".into()));
        }
        let mut memberships = memberships;
        for (d, row) in memberships.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            if row.is_empty() {
                return Err(Error::Configuration(format!(
                    "document #{d} belongs to no group"
                )));
            }
            if let Some(&g) = row.iter().find(|&&g| g >= group_ids.len()) {
                return Err(Error::Configuration(format!("unknown group index {g}")));
            }
        }
        Ok(GroupAttribution {
            memberships,
            group_ids,
        })
    }

    /// One group per document; `labels[d]` is its group index.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let n_groups = labels.iter().copied().max().map_or(0, |m| m + 1);
        Self::new(
            labels.iter().map(|&g| vec![g]).collect(),
            (0..n_groups).map(|g| format!("g{g}")).collect(),
        )
    }

    /// Builds the attribution for `judgments`' pool from `(doc, group)` rows.
    /// Rows for documents outside the pool are ignored; pool documents without
    /// a row are an error.
    pub fn from_pairs<'a, I>(judgments: &RelevanceJudgments, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut group_ids: Vec<String> = Vec::new();
        let mut memberships = vec![Vec::new(); judgments.len()];
        for (doc, group) in pairs {
            let Some(d) = judgments.index_of(doc) else {
                continue;
            };
            let g = match group_ids.iter().position(|x| x == group) {
                Some(g) => g,
                None => {
                    group_ids.push(group.to_string());
                    group_ids.len() - 1
                }
            };
            memberships[d].push(g);
        }
        if let Some(d) = memberships.iter().position(Vec::is_empty) {
            return Err(Error::Configuration(format!(
                "document `{}` of query `{}` has no group",
                judgments.pool()[d],
                judgments.query_id()
            )));
        }
        Self::new(memberships, group_ids)
    }

    pub fn len(&self) -> usize {
        self.memberships.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memberships.is_empty()
    }

    pub fn n_groups(&self) -> usize {
        self.group_ids.len()
    }

    pub fn group_ids(&self) -> &[String] {
        &self.group_ids
    }

    pub fn groups_of(&self, doc: usize) -> &[usize] {
        &self.memberships[doc]
    }

    /// `Aᵀv`.
    pub fn aggregate(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_groups()];
        for (row, &v) in self.memberships.iter().zip(values) {
            for &g in row {
                out[g] += v;
            }
        }
        out
    }

    /// `(diag(y) A)ᵀ v`: only documents with `y_d ≠ 0` contribute.
    pub fn aggregate_masked(&self, values: &[f64], mask: &[f64]) -> Vec<f64> {
        let masked: Vec<f64> = values.iter().zip(mask).map(|(v, y)| v * y).collect();
        self.aggregate(&masked)
    }
}

/// Which group-level target exposure to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupMode {
    /// Equal split of the total exposure mass across groups.
    DemographicParity,
    /// Exposure proportional to each group's relevant documents.
    DisparateTreatment,
    /// Like disparate treatment, but only exposure on relevant documents counts.
    DisparateImpact,
}

impl GroupMode {
    pub fn name(self) -> &'static str {
        match self {
            GroupMode::DemographicParity => "demographic_parity",
            GroupMode::DisparateTreatment => "disparate_treatment",
            GroupMode::DisparateImpact => "disparate_impact",
        }
    }
}

impl fmt::Display for GroupMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "demographic_parity" | "dp" => Ok(GroupMode::DemographicParity),
            "disparate_treatment" | "dt" => Ok(GroupMode::DisparateTreatment),
            "disparate_impact" | "di" => Ok(GroupMode::DisparateImpact),
            other => Err(Error::Configuration(format!(
                "unknown group mode `{other}`"
            ))),
        }
    }
}

fn check_pool(len: usize, other: usize) -> Result<()> {
    if len != other {
        return Err(Error::Dimension {
            left: len,
            right: other,
        });
    }
    Ok(())
}

/// Squared-error breakdown between group exposure `ξ` and its target `ξ*`.
///
/// The total mass `s` is the deterministic exposure `Σ_{i<δ} γ^i` over the
/// pool. Relevance is binarized (`grade > 0`).
pub fn group_fairness_loss(
    exposure: &ExposureVector,
    groups: &GroupAttribution,
    judgments: &RelevanceJudgments,
    mode: GroupMode,
    model: &BrowsingModel,
) -> Result<EEBreakdown> {
    check_pool(exposure.len(), judgments.len())?;
    check_pool(groups.len(), judgments.len())?;
    let s = model.total_mass(judgments.len());
    let y = judgments.binary_relevance();
    let (xi, weights) = match mode {
        GroupMode::DemographicParity => (
            groups.aggregate(exposure.values()),
            vec![1.0; groups.n_groups()],
        ),
        GroupMode::DisparateTreatment => {
            (groups.aggregate(exposure.values()), groups.aggregate(&y))
        }
        GroupMode::DisparateImpact => (
            groups.aggregate_masked(exposure.values(), &y),
            groups.aggregate_masked(&y, &y),
        ),
    };
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::EmptyRelevance(judgments.query_id().to_string()));
    }
    let target: Vec<f64> = weights.iter().map(|w| s * w / total).collect();
    breakdown_of(&xi, &target)
}

/// Normalizes group disparity `‖Aᵀε‖²` onto `[0, 1]` between the uniform
/// random policy and `s²` (all exposure mass on one group).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupNormalizer {
    lo: f64,
    hi: f64,
}

impl GroupNormalizer {
    pub fn new(
        model: &BrowsingModel,
        judgments: &RelevanceJudgments,
        groups: &GroupAttribution,
    ) -> Result<Self> {
        check_pool(groups.len(), judgments.len())?;
        let uniform = uniform_expected_exposure(model, judgments);
        let lo: f64 = groups
            .aggregate(uniform.values())
            .iter()
            .map(|x| x * x)
            .sum();
        let s = model.total_mass(judgments.len());
        let hi = s * s;
        if !(hi - lo > 1e-15) {
            return Err(Error::DegenerateNormalization(hi - lo));
        }
        Ok(GroupNormalizer { lo, hi })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn normalize(&self, group_disparity: f64) -> f64 {
        ((group_disparity - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}

/// Intent (subtopic) labels: the intents each pool document is relevant to.
#[derive(Debug, Clone, PartialEq)]
pub struct IntentJudgments {
    doc_intents: Vec<Vec<usize>>,
    n_intents: usize,
}

impl IntentJudgments {
    pub fn new(doc_intents: Vec<Vec<usize>>, n_intents: usize) -> Result<Self> {
        if n_intents == 0 {
            return Err(Error::Configuration("empty intent set".into()));
        }
        if doc_intents.iter().flatten().any(|&i| i >= n_intents) {
            return Err(Error::Configuration("intent index out of range".into()));
        }
        Ok(IntentJudgments {
            doc_intents,
            n_intents,
        })
    }

    pub fn n_intents(&self) -> usize {
        self.n_intents
    }

    pub fn len(&self) -> usize {
        self.doc_intents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_intents.is_empty()
    }

    pub fn intents_of(&self, doc: usize) -> &[usize] {
        &self.doc_intents[doc]
    }

    /// Number of relevant documents per intent.
    pub fn frequencies(&self) -> Vec<usize> {
        let mut f = vec![0; self.n_intents];
        for &i in self.doc_intents.iter().flatten() {
            f[i] += 1;
        }
        f
    }

    /// Intents as a group attribution; documents without an intent are put
    /// in an extra catch-all group.
    pub fn as_groups(&self) -> Result<GroupAttribution> {
        let catch_all = self.n_intents;
        let rows = self
            .doc_intents
            .iter()
            .map(|r| {
                if r.is_empty() {
                    vec![catch_all]
                } else {
                    r.clone()
                }
            })
            .collect();
        let mut ids: Vec<String> = (0..self.n_intents).map(|i| format!("i{i}")).collect();
        ids.push("none".into());
        GroupAttribution::new(rows, ids)
    }
}

/// Intent-aware RBP averaged over sampled rankings:
/// `Σ_i p(i|q) · mean_σ (1−γ) Σ_{r<δ} [σ_r relevant to i] γ^r`.
pub fn intent_aware_rbp(
    samples: &[Ranking],
    intents: &IntentJudgments,
    gamma: f64,
    depth: Option<usize>,
    prior: &[f64],
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Configuration("no sampled rankings".into()));
    }
    if prior.len() != intents.n_intents() {
        return Err(Error::Configuration(format!(
            "intent prior has {} entries for {} intents",
            prior.len(),
            intents.n_intents()
        )));
    }
    let mass: f64 = prior.iter().sum();
    if prior.iter().any(|&p| !(p >= 0.0)) || (mass - 1.0).abs() > 1e-9 {
        return Err(Error::Configuration(
            "intent prior must be a probability distribution".into(),
        ));
    }
    let mut per_intent = vec![0.0; intents.n_intents()];
    for ranking in samples {
        let order = ranking.order();
        let visible = depth.map_or(order.len(), |d| d.min(order.len()));
        let mut weight = 1.0;
        for &d in &order[..visible] {
            if d >= intents.len() {
                return Err(Error::IndexOutOfPool {
                    index: d,
                    pool: intents.len(),
                });
            }
            for &i in intents.intents_of(d) {
                per_intent[i] += weight;
            }
            weight *= gamma;
        }
    }
    let scale = (1.0 - gamma) / samples.len() as f64;
    Ok(per_intent
        .iter()
        .zip(prior)
        .map(|(v, p)| p * v * scale)
        .sum())
}
