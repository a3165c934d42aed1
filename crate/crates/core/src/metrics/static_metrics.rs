use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::exposure::ExposureVector;
use crate::judgments::RelevanceJudgments;
use crate::model::{BrowsingModel, StopMap};
use crate::policies::Policy;
use crate::ranking::Ranking;
use crate::rng::StreamRng;

pub const DEFAULT_ENTROPY_EXPONENT: f64 = 2.0;

fn visible(depth: Option<usize>, len: usize) -> usize {
    depth.map_or(len, |d| d.min(len))
}

/// Rank-biased precision of one ranking, `(1−γ) Σ_{i<δ} rel(σ_i) γ^i`, with
/// grades binarized at `> 0`.
pub fn static_rbp(
    ranking: &Ranking,
    judgments: &RelevanceJudgments,
    gamma: f64,
    depth: Option<usize>,
) -> f64 {
    let order = ranking.order();
    let mut weight = 1.0;
    let mut total = 0.0;
    for &d in &order[..visible(depth, order.len())] {
        if judgments.is_relevant(d) {
            total += weight;
        }
        weight *= gamma;
    }
    (1.0 - gamma) * total
}

/// Generalized ERR of one ranking,
/// `Σ_{i<δ} φ(g(σ_i)) Π_{j<i} γ (1 − φ(g(σ_j)))`.
pub fn static_err(
    ranking: &Ranking,
    judgments: &RelevanceJudgments,
    gamma: f64,
    depth: Option<usize>,
    stop: &StopMap,
) -> f64 {
    let order = ranking.order();
    let mut reach = 1.0;
    let mut total = 0.0;
    for &d in &order[..visible(depth, order.len())] {
        let phi = stop.phi(judgments.grade(d));
        total += phi * reach;
        reach *= gamma * (1.0 - phi);
    }
    total
}

/// Expected static RBP and ERR of a policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticExpectation {
    pub rbp: f64,
    pub err: f64,
}

/// Averages static RBP and ERR over `n_samples` rankings. With the same seed
/// this sees exactly the rankings used by
/// [`expected_exposure_mc`](crate::exposure::expected_exposure_mc).
pub fn expected_static_metrics(
    policy: &Policy,
    model: &BrowsingModel,
    judgments: &RelevanceJudgments,
    n_samples: usize,
    seed: u64,
) -> Result<StaticExpectation> {
    if n_samples == 0 {
        return Err(Error::Configuration("n_samples must be positive".into()));
    }
    let mut rng = StreamRng::seed_from_u64(seed);
    let mut rbp = 0.0;
    let mut err = 0.0;
    for _ in 0..n_samples {
        let r = policy.sample(&mut rng);
        rbp += static_rbp(&r, judgments, model.gamma(), model.depth());
        err += static_err(
            &r,
            judgments,
            model.gamma(),
            model.depth(),
            model.stop_map(),
        );
    }
    let n = n_samples as f64;
    Ok(StaticExpectation {
        rbp: rbp / n,
        err: err / n,
    })
}

/// Generalized entropy index `GE(a) = Σ ((x_i/μ)^a − 1) / (n a (a−1))`.
///
/// Zero exactly when all values are equal. The `a ∈ {0, 1}` limits are not
/// supported.
pub fn generalized_entropy(values: &[f64], a: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Configuration(
            "generalized entropy of no values".into(),
        ));
    }
    if a == 0.0 || a == 1.0 || !a.is_finite() {
        return Err(Error::Configuration(format!(
            "unsupported generalized entropy exponent {a}"
        )));
    }
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    if !(mu > 0.0) {
        return Err(Error::UndefinedEntropy);
    }
    let s: f64 = values.iter().map(|&x| (x / mu).powf(a) - 1.0).sum();
    Ok((s / (n * a * (a - 1.0))).max(0.0))
}

/// Generalized entropy of exposure restricted to documents with grade `> 0`.
pub fn relevant_generalized_entropy(
    exposure: &ExposureVector,
    judgments: &RelevanceJudgments,
    a: f64,
) -> Result<f64> {
    let relevant: Vec<f64> = (0..judgments.len())
        .filter(|&d| judgments.is_relevant(d))
        .map(|d| exposure.get(d))
        .collect();
    if relevant.is_empty() {
        return Err(Error::EmptyRelevance(judgments.query_id().to_string()));
    }
    generalized_entropy(&relevant, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(grades: &[u32]) -> RelevanceJudgments {
        RelevanceJudgments::from_grades("q", grades)
    }

    #[test]
    fn rbp_values() {
        let r = Ranking::identity(3);
        assert_eq!(static_rbp(&r, &j(&[1, 0, 0]), 0.5, None), 0.5);
        assert_eq!(static_rbp(&r, &j(&[0, 0, 0]), 0.5, None), 0.0);
        assert_eq!(static_rbp(&r, &j(&[1, 1, 0]), 0.5, None), 0.75);
        assert_eq!(static_rbp(&r, &j(&[0, 1, 1]), 0.5, Some(1)), 0.0);
    }

    #[test]
    fn err_values() {
        let stop = StopMap::new(vec![0.0, 0.5]).unwrap();
        let r = Ranking::identity(2);
        assert_eq!(static_err(&r, &j(&[1, 0]), 0.5, None, &stop), 0.5);
        assert_eq!(static_err(&r, &j(&[0, 0]), 0.5, None, &stop), 0.0);
        assert_eq!(static_err(&r, &j(&[1, 1]), 0.5, None, &stop), 0.625);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(generalized_entropy(&[0.3, 0.3], 2.0).unwrap(), 0.0);
        assert!((generalized_entropy(&[1.0, 0.0], 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(generalized_entropy(&[0.6, 0.6, 0.6], 2.0).unwrap(), 0.0);
        assert_eq!(
            generalized_entropy(&[0.0, 0.0], 2.0),
            Err(Error::UndefinedEntropy)
        );
        assert!(generalized_entropy(&[0.4, 0.1], 1.0).is_err());
    }

    #[test]
    fn entropy_on_relevant_set_only() {
        let ex = ExposureVector::new(vec![0.5, 0.9, 0.5]).unwrap();
        let e = relevant_generalized_entropy(&ex, &j(&[1, 0, 2]), 2.0).unwrap();
        assert_eq!(e, 0.0);
        assert!(matches!(
            relevant_generalized_entropy(&ex, &j(&[0, 0, 0]), 2.0),
            Err(Error::EmptyRelevance(_))
        ));
    }
}
