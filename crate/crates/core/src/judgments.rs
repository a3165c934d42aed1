//! Per-query relevance judgments over a candidate pool.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Graded relevance judgments for one query.
///
/// The pool is the ordered list of candidate documents; every pool member has
/// exactly one nonnegative integer grade. Exposure vectors and rankings refer
/// to documents by their index in this pool.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceJudgments {
    query_id: String,
    pool: Vec<String>,
    grades: Vec<u32>,
    index: HashMap<String, usize>,
}

impl RelevanceJudgments {
    /// Builds judgments from `(document, grade)` pairs. Duplicate documents are
    /// rejected.
    pub fn new<I, S>(query_id: impl Into<String>, judged: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let query_id = query_id.into();
        let mut out = RelevanceJudgments {
            query_id,
            pool: Vec::new(),
            grades: Vec::new(),
            index: HashMap::new(),
        };
        for (doc, grade) in judged {
            let doc = doc.into();
            if out.index.contains_key(&doc) {
                return Err(Error::Configuration(format!(
                    "document `{doc}` judged twice for query `{}`",
                    out.query_id
                )));
            }
            out.push(doc, grade);
        }
        Ok(out)
    }

    /// Judgments with anonymous documents `d0, d1, ...` carrying `grades`.
    pub fn from_grades(query_id: impl Into<String>, grades: &[u32]) -> Self {
        let pairs = grades
            .iter()
            .enumerate()
            .map(|(i, &g)| (format!("d{i}"), g));
        Self::new(query_id, pairs).expect("generated ids are unique")
    }

    fn push(&mut self, doc: String, grade: u32) {
        self.index.insert(doc.clone(), self.pool.len());
        self.pool.push(doc);
        self.grades.push(grade);
    }

    /// Extends the pool with retrieved documents; unjudged ones get grade 0.
    pub fn with_retrieved<'a, I>(mut self, docs: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        for doc in docs {
            if !self.index.contains_key(doc) {
                self.push(doc.to_string(), 0);
            }
        }
        self
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn len(&self) -> usize {
        self.pool.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pool.is_empty()
    }

    pub fn pool(&self) -> &[String] {
        &self.pool
    }

    pub fn grades(&self) -> &[u32] {
        &self.grades
    }

    pub fn grade(&self, index: usize) -> u32 {
        self.grades[index]
    }

    pub fn index_of(&self, doc: &str) -> Option<usize> {
        self.index.get(doc).copied()
    }

    /// Pool index of `doc`, or a judgment-mismatch error.
    pub fn require(&self, doc: &str) -> Result<usize> {
        self.index_of(doc).ok_or_else(|| Error::JudgmentMismatch {
            query: self.query_id.clone(),
            doc: doc.to_string(),
        })
    }

    pub fn max_grade(&self) -> u32 {
        self.grades.iter().copied().max().unwrap_or(0)
    }

    /// `m_g` for every grade `0..=max_grade`.
    pub fn grade_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_grade() as usize + 1];
        for &g in &self.grades {
            counts[g as usize] += 1;
        }
        counts
    }

    /// `m_g`: number of documents at grade `g`.
    pub fn count_at(&self, grade: u32) -> usize {
        self.grades.iter().filter(|&&g| g == grade).count()
    }

    /// `m_{>g}`: number of documents strictly above grade `g`.
    pub fn count_above(&self, grade: u32) -> usize {
        self.grades.iter().filter(|&&g| g > grade).count()
    }

    /// `R`: number of documents with a positive grade.
    pub fn num_relevant(&self) -> usize {
        self.count_above(0)
    }

    pub fn is_relevant(&self, index: usize) -> bool {
        self.grades[index] > 0
    }

    /// Binary relevance vector `y`.
    pub fn binary_relevance(&self) -> Vec<f64> {
        self.grades
            .iter()
            .map(|&g| if g > 0 { 1.0 } else { 0.0 })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grade_counts_partition_the_pool() {
        let j = RelevanceJudgments::from_grades("q", &[2, 0, 1, 1, 0, 0]);
        let counts = j.grade_counts();
        assert_eq!(counts, vec![3, 2, 1]);
        assert_eq!(counts.iter().sum::<usize>(), j.len());
        assert_eq!(j.count_above(0), 3);
        assert_eq!(j.count_above(1), 1);
        assert_eq!(j.count_above(2), 0);
        assert_eq!(j.num_relevant(), 3);
    }

    #[test]
    fn duplicate_judgment_is_rejected() {
        let err = RelevanceJudgments::new("q", [("a", 1), ("a", 2)]).unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));
    }

    #[test]
    fn retrieved_documents_default_to_grade_zero() {
        let j = RelevanceJudgments::new("q", [("a", 1)])
            .unwrap()
            .with_retrieved(["b", "a", "c"]);
        assert_eq!(j.pool(), &["a", "b", "c"]);
        assert_eq!(j.grades(), &[1, 0, 0]);
        assert!(j.require("zz").is_err());
    }
}
