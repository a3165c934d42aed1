//! Learning-to-rank datasets: per-query feature matrices with graded labels.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::judgments::RelevanceJudgments;
use crate::metrics::GroupAttribution;
use crate::rng::stream;

/// One query's candidate documents.
#[derive(Debug, Clone, PartialEq)]
pub struct LtrQuery {
    pub query_id: String,
    pub doc_ids: Vec<String>,
    /// Row-major `n_docs × n_features`.
    pub features: Vec<f64>,
    pub grades: Vec<u32>,
    /// Group index per document, into [`LtrDataset::group_names`].
    pub groups: Option<Vec<usize>>,
}

impl LtrQuery {
    pub fn n_docs(&self) -> usize {
        self.grades.len()
    }

    pub fn row(&self, doc: usize, n_features: usize) -> &[f64] {
        &self.features[doc * n_features..(doc + 1) * n_features]
    }

    pub fn judgments(&self) -> RelevanceJudgments {
        RelevanceJudgments::new(
            self.query_id.clone(),
            self.doc_ids
                .iter()
                .cloned()
                .zip(self.grades.iter().copied()),
        )
        .expect("document ids validated unique")
    }

    pub fn group_attribution(&self) -> Option<Result<GroupAttribution>> {
        self.groups
            .as_ref()
            .map(|g| GroupAttribution::from_labels(g))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LtrDataset {
    n_features: usize,
    queries: Vec<LtrQuery>,
    group_names: Vec<String>,
}

impl LtrDataset {
    pub fn new(n_features: usize, queries: Vec<LtrQuery>) -> Result<Self> {
        for q in &queries {
            let n = q.grades.len();
            if q.doc_ids.len() != n || q.features.len() != n * n_features {
                return Err(Error::Configuration(format!(
                    "query `{}`: inconsistent shapes ({} ids, {} grades, {} feature values for {} dims)",
                    q.query_id,
                    q.doc_ids.len(),
                    n,
                    q.features.len(),
                    n_features
                )));
            }
            let mut ids: Vec<&String> = q.doc_ids.iter().collect();
            ids.sort();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Configuration(format!(
                    "query `{}` has duplicate document ids",
                    q.query_id
                )));
            }
            if let Some(g) = &q.groups {
                if g.len() != n {
                    return Err(Error::Configuration(format!(
                        "query `{}`: {} group labels for {} documents",
                        q.query_id,
                        g.len(),
                        n
                    )));
                }
            }
        }
        let n_groups = queries
            .iter()
            .filter_map(|q| q.groups.as_ref())
            .flatten()
            .copied()
            .max()
            .map_or(0, |m| m + 1);
        Ok(LtrDataset {
            n_features,
            queries,
            group_names: (0..n_groups).map(|g| g.to_string()).collect(),
        })
    }

    pub fn with_group_names(mut self, names: Vec<String>) -> Self {
        self.group_names = names;
        self
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn queries(&self) -> &[LtrQuery] {
        &self.queries
    }

    pub fn queries_mut(&mut self) -> &mut [LtrQuery] {
        &mut self.queries
    }

    pub fn group_names(&self) -> &[String] {
        &self.group_names
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn has_groups(&self) -> bool {
        !self.queries.is_empty() && self.queries.iter().all(|q| q.groups.is_some())
    }

    /// Attaches group labels from `(query, doc, group)` rows. Every document
    /// must receive a label.
    pub fn attach_groups<'a, I>(&mut self, rows: I) -> Result<()>
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        use std::collections::HashMap;
        let mut names: Vec<String> = Vec::new();
        let mut lookup: HashMap<(&str, &str), usize> = HashMap::new();
        for (q, d, g) in rows {
            let idx = match names.iter().position(|n| n == g) {
                Some(i) => i,
                None => {
                    names.push(g.to_string());
                    names.len() - 1
                }
            };
            lookup.insert((q, d), idx);
        }
        for q in &mut self.queries {
            let labels = q
                .doc_ids
                .iter()
                .map(|d| {
                    lookup
                        .get(&(q.query_id.as_str(), d.as_str()))
                        .copied()
                        .ok_or_else(|| {
                            Error::Configuration(format!(
                                "no group for document `{d}` of query `{}`",
                                q.query_id
                            ))
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            q.groups = Some(labels);
        }
        self.group_names = names;
        Ok(())
    }

    /// Shuffles queries with `seed` and splits them by the given fractions
    /// (train, validation); the remainder is the test split.
    pub fn split(&self, train: f64, valid: f64, seed: u64) -> (Self, Self, Self) {
        let mut order: Vec<usize> = (0..self.queries.len()).collect();
        order.shuffle(&mut stream(seed, "split", 0));
        let n = order.len() as f64;
        let n_train = (n * train).round() as usize;
        let n_valid = ((n * valid).round() as usize).min(order.len() - n_train.min(order.len()));
        let take = |idx: &[usize]| LtrDataset {
            n_features: self.n_features,
            queries: idx.iter().map(|&i| self.queries[i].clone()).collect(),
            group_names: self.group_names.clone(),
        };
        let n_train = n_train.min(order.len());
        (
            take(&order[..n_train]),
            take(&order[n_train..n_train + n_valid]),
            take(&order[n_train + n_valid..]),
        )
    }
}

/// Per-feature min-max scaling fitted on one split.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(data: &LtrDataset) -> Self {
        let f = data.n_features();
        let mut min = vec![f64::INFINITY; f];
        let mut max = vec![f64::NEG_INFINITY; f];
        for q in data.queries() {
            for row in q.features.chunks(f.max(1)) {
                for (k, &v) in row.iter().enumerate() {
                    min[k] = min[k].min(v);
                    max[k] = max[k].max(v);
                }
            }
        }
        MinMaxScaler { min, max }
    }

    pub fn from_bounds(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::Dimension {
                left: min.len(),
                right: max.len(),
            });
        }
        Ok(MinMaxScaler { min, max })
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.min, &self.max)
    }

    /// Maps each feature to `(x − min) / (max − min)`; features that were
    /// constant on the fitting split map to 0.
    pub fn apply(&self, data: &mut LtrDataset) {
        let f = data.n_features();
        for q in data.queries_mut() {
            for row in q.features.chunks_mut(f.max(1)) {
                for (k, v) in row.iter_mut().enumerate() {
                    let range = self.max[k] - self.min[k];
                    *v = if range > 0.0 && range.is_finite() {
                        (*v - self.min[k]) / range
                    } else {
                        0.0
                    };
                }
            }
        }
    }
}
