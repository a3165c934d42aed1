//! User browsing models.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Rank-biased precision: position `i` is visited with probability `γ^i`.
    Rbp,
    /// Generalized expected reciprocal rank: the user continues past a
    /// document with probability `γ(1 − φ(grade))`.
    Err,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Rbp => f.write_str("rbp"),
            ModelKind::Err => f.write_str("err"),
        }
    }
}

/// Stopping probability `φ` indexed by grade.
///
/// Grades above the last table entry reuse the last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct StopMap(Vec<f64>);

impl StopMap {
    pub fn new(table: Vec<f64>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidModel("empty stop-probability table".into()));
        }
        if table[0] != 0.0 {
            return Err(Error::InvalidModel(format!(
                "φ(0) must be 0, got {}",
                table[0]
            )));
        }
        for w in table.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidModel(
                    "φ must be nondecreasing in grade".into(),
                ));
            }
        }
        if let Some(&bad) = table.iter().find(|&&p| !(0.0..1.0).contains(&p)) {
            return Err(Error::InvalidModel(format!("φ value {bad} outside [0,1)")));
        }
        Ok(StopMap(table))
    }

    /// `φ(g) = (2^g − 1) / 2^max_grade`, the usual ERR gain mapping.
    pub fn exponential(max_grade: u32) -> Self {
        let max_grade = max_grade.max(1);
        let denom = 2f64.powi(max_grade as i32);
        StopMap(
            (0..=max_grade)
                .map(|g| (2f64.powi(g as i32) - 1.0) / denom)
                .collect(),
        )
    }

    pub fn phi(&self, grade: u32) -> f64 {
        let g = (grade as usize).min(self.0.len() - 1);
        self.0[g]
    }

    pub fn table(&self) -> &[f64] {
        &self.0
    }
}

impl Default for StopMap {
    fn default() -> Self {
        StopMap::exponential(1)
    }
}

/// A browsing model: kind, patience `γ`, optional depth `δ` and stop map `φ`.
///
/// Ranks at or beyond `δ` receive zero exposure. `depth == None` means
/// unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct BrowsingModel {
    kind: ModelKind,
    gamma: f64,
    depth: Option<usize>,
    stop: StopMap,
}

impl BrowsingModel {
    pub fn rbp(gamma: f64) -> Result<Self> {
        Self::new(ModelKind::Rbp, gamma, None, StopMap::default())
    }

    pub fn err(gamma: f64, stop: StopMap) -> Result<Self> {
        Self::new(ModelKind::Err, gamma, None, stop)
    }

    pub fn new(kind: ModelKind, gamma: f64, depth: Option<usize>, stop: StopMap) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidModel(format!(
                "γ must lie in (0,1), got {gamma}"
            )));
        }
        if depth == Some(0) {
            return Err(Error::InvalidModel("depth must be positive".into()));
        }
        Ok(BrowsingModel {
            kind,
            gamma,
            depth,
            stop,
        })
    }

    pub fn with_depth(mut self, depth: Option<usize>) -> Result<Self> {
        if depth == Some(0) {
            return Err(Error::InvalidModel("depth must be positive".into()));
        }
        self.depth = depth;
        Ok(self)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn depth(&self) -> Option<usize> {
        self.depth
    }

    pub fn stop_map(&self) -> &StopMap {
        &self.stop
    }

    /// Number of exposed positions in a list of `n` documents.
    pub fn visible_positions(&self, n: usize) -> usize {
        self.depth.map_or(n, |d| d.min(n))
    }

    pub fn within_depth(&self, rank: usize) -> bool {
        self.depth.is_none_or(|d| rank < d)
    }

    /// Probability of continuing past a document of `grade` (before the `γ`
    /// discount). Always 1 under RBP.
    pub fn continuation(&self, grade: u32) -> f64 {
        match self.kind {
            ModelKind::Rbp => 1.0,
            ModelKind::Err => 1.0 - self.stop.phi(grade),
        }
    }

    /// Grade-independent position weights `γ^i` for the first
    /// `visible_positions(n)` ranks. For ERR these are an upper bound (`φ = 0`).
    pub fn position_weights(&self, n: usize) -> Vec<f64> {
        let k = self.visible_positions(n);
        let mut w = Vec::with_capacity(k);
        let mut p = 1.0;
        for _ in 0..k {
            w.push(p);
            p *= self.gamma;
        }
        w
    }

    /// `Σ w_i²` over visible positions: disparity of any deterministic ranking
    /// under RBP.
    pub fn max_disparity(&self, n: usize) -> f64 {
        self.position_weights(n).iter().map(|w| w * w).sum()
    }

    /// `Σ w_i` over visible positions: total exposure mass of a deterministic
    /// ranking under RBP.
    pub fn total_mass(&self, n: usize) -> f64 {
        self.position_weights(n).iter().sum()
    }
}
