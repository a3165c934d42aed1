use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::judgments::RelevanceJudgments;

/// A system's scored retrieval list for one query.
///
/// Entries are kept in descending score order; ties keep the order in which
/// they were supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRun {
    query_id: String,
    tag: String,
    entries: Vec<(String, f64)>,
}

impl ScoredRun {
    pub fn new(
        query_id: impl Into<String>,
        tag: impl Into<String>,
        mut entries: Vec<(String, f64)>,
    ) -> Result<Self> {
        let query_id = query_id.into();
        let mut seen = HashSet::with_capacity(entries.len());
        for (doc, score) in &entries {
            if !score.is_finite() {
                return Err(Error::Configuration(format!(
                    "non-finite score for `{doc}` in query `{query_id}`"
                )));
            }
            if !seen.insert(doc.as_str()) {
                return Err(Error::Configuration(format!(
                    "document `{doc}` retrieved twice for query `{query_id}`"
                )));
            }
        }
        entries.sort_by(|a, b| b.1.total_cmp(&a.1));
        Ok(ScoredRun {
            query_id,
            tag: tag.into(),
            entries,
        })
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(d, _)| d.as_str())
    }

    /// Judgments whose pool also contains every retrieved document.
    pub fn pooled(&self, judgments: RelevanceJudgments) -> RelevanceJudgments {
        judgments.with_retrieved(self.doc_ids())
    }

    /// The run's static order as pool indices.
    pub fn pool_order(&self, judgments: &RelevanceJudgments) -> Result<Vec<usize>> {
        self.doc_ids().map(|d| judgments.require(d)).collect()
    }
}

/// Makes scores strictly positive for `s^α` sampling.
///
/// If any score is `≤ 0`, every score is shifted by `−min + 10⁻⁶·range`.
/// Order is preserved and only a constant list collapses to zero, which is an
/// error.
pub fn preprocess_scores(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.iter().all(|&s| s > 0.0) {
        return Ok(scores.to_vec());
    }
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shift = -min + 1e-6 * (max - min);
    let shifted: Vec<f64> = scores.iter().map(|&s| s + shift).collect();
    if shifted.iter().all(|&s| s <= 0.0) {
        return Err(Error::DegenerateScores);
    }
    Ok(shifted)
}
