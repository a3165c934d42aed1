//! Training objectives and their gradients.

use std::fmt;
use std::str::FromStr;

use expexp_core::metrics::GroupAttribution;

use crate::error::LtrError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// `λ‖ε‖² − (1−λ)εᵀε*`
    ExpectedExposure,
    /// `λ‖Aᵀε‖² − (1−λ)εᵀε*`
    GroupParity,
    /// Squared error between score and grade.
    Pointwise,
    /// Cross-entropy on within-query preference pairs.
    Pairwise,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::ExpectedExposure => "ee",
            Objective::GroupParity => "group",
            Objective::Pointwise => "pointwise",
            Objective::Pairwise => "pairwise",
        }
    }

    /// Whether the objective is computed on sampled rankings.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Objective::ExpectedExposure | Objective::GroupParity)
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = LtrError;

    fn from_str(s: &str) -> Result<Self, LtrError> {
        match s {
            "ee" => Ok(Objective::ExpectedExposure),
            "group" | "dp" => Ok(Objective::GroupParity),
            "pointwise" => Ok(Objective::Pointwise),
            "pairwise" => Ok(Objective::Pairwise),
            other => Err(LtrError::Configuration(format!(
                "unknown objective `{other}` (expected ee, group, pointwise or pairwise)"
            ))),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `λ‖ε‖² − (1−λ)εᵀε*`.
pub fn ee_objective(exposure: &[f64], target: &[f64], lambda: f64) -> f64 {
    lambda * dot(exposure, exposure) - (1.0 - lambda) * dot(exposure, target)
}

pub fn ee_objective_grad(exposure: &[f64], target: &[f64], lambda: f64) -> Vec<f64> {
    exposure
        .iter()
        .zip(target)
        .map(|(e, t)| 2.0 * lambda * e - (1.0 - lambda) * t)
        .collect()
}

/// `λ‖ξ‖² − (1−λ)εᵀε*` with group exposure `ξ = Aᵀε`.
pub fn group_objective(
    exposure: &[f64],
    groups: &GroupAttribution,
    target: &[f64],
    lambda: f64,
) -> f64 {
    let xi = groups.aggregate(exposure);
    lambda * dot(&xi, &xi) - (1.0 - lambda) * dot(exposure, target)
}

pub fn group_objective_grad(
    exposure: &[f64],
    groups: &GroupAttribution,
    target: &[f64],
    lambda: f64,
) -> Vec<f64> {
    let xi = groups.aggregate(exposure);
    (0..exposure.len())
        .map(|d| {
            let share: f64 = groups.groups_of(d).iter().map(|&g| xi[g]).sum();
            2.0 * lambda * share - (1.0 - lambda) * target[d]
        })
        .collect()
}

/// Mean squared error between scores and grades, with its gradient.
pub fn pointwise_loss(scores: &[f64], grades: &[u32]) -> (f64, Vec<f64>) {
    let n = scores.len().max(1) as f64;
    let mut loss = 0.0;
    let grad = scores
        .iter()
        .zip(grades)
        .map(|(&s, &g)| {
            let r = s - g as f64;
            loss += r * r;
            2.0 * r / n
        })
        .collect();
    (loss / n, grad)
}

/// Mean `ln(1 + exp(−(s_i − s_j)))` over pairs with `grade_i > grade_j`, with
/// its gradient. Zero when the query has a single grade.
pub fn pairwise_loss(scores: &[f64], grades: &[u32]) -> (f64, Vec<f64>) {
    let n = scores.len();
    let mut grad = vec![0.0; n];
    let mut loss = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in 0..n {
            if grades[i] <= grades[j] {
                continue;
            }
            let margin = scores[i] - scores[j];
            // softplus(−m), stable for large |m|
            loss += (-margin).max(0.0) + (-margin.abs()).exp().ln_1p();
            let p = 1.0 / (1.0 + margin.exp());
            grad[i] -= p;
            grad[j] += p;
            pairs += 1;
        }
    }
    if pairs == 0 {
        return (0.0, grad);
    }
    let k = pairs as f64;
    grad.iter_mut().for_each(|g| *g /= k);
    (loss / k, grad)
}
