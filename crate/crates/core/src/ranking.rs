//! Rankings as prefix permutations of a judgment pool.

use crate::error::{Error, Result};
use crate::judgments::RelevanceJudgments;

/// An ordered list of distinct pool indices; position `i` holds `σ(i)`.
///
/// A ranking may cover only a prefix of the pool. Documents it omits sit at
/// ranks beyond its length and receive no exposure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ranking {
    order: Vec<usize>,
}

impl Ranking {
    /// Validates that `order` has no duplicates and stays inside a pool of
    /// `pool_len` documents.
    pub fn new(order: Vec<usize>, pool_len: usize) -> Result<Self> {
        let mut seen = vec![false; pool_len];
        for &d in &order {
            if d >= pool_len {
                return Err(Error::IndexOutOfPool {
                    index: d,
                    pool: pool_len,
                });
            }
            if std::mem::replace(&mut seen[d], true) {
                return Err(Error::DuplicateDocument(d));
            }
        }
        Ok(Ranking { order })
    }

    /// Ranking over `judgments`' pool built from document ids.
    pub fn from_ids<S: AsRef<str>>(judgments: &RelevanceJudgments, ids: &[S]) -> Result<Self> {
        let order = ids
            .iter()
            .map(|id| judgments.require(id.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ranking::new(order, judgments.len())
    }

    /// Caller guarantees `order` is duplicate-free.
    pub(crate) fn from_order_unchecked(order: Vec<usize>) -> Self {
        debug_assert!({
            let mut v = order.clone();
            v.sort_unstable();
            v.windows(2).all(|w| w[0] != w[1])
        });
        Ranking { order }
    }

    pub fn identity(n: usize) -> Self {
        Ranking {
            order: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `σ⁻¹` over a pool of `pool_len` documents; `None` for unranked ones.
    pub fn rank_of(&self, pool_len: usize) -> Vec<Option<usize>> {
        let mut ranks = vec![None; pool_len];
        for (r, &d) in self.order.iter().enumerate() {
            ranks[d] = Some(r);
        }
        ranks
    }

    pub fn doc_ids<'a>(&self, judgments: &'a RelevanceJudgments) -> Vec<&'a str> {
        self.order
            .iter()
            .map(|&d| judgments.pool()[d].as_str())
            .collect()
    }
}
