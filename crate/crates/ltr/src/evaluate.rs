//! Held-out evaluation of trained scorers as Plackett-Luce policies.

use log::warn;
use rayon::prelude::*;

use expexp_core::dataset::{LtrDataset, LtrQuery};
use expexp_core::metrics::{ee_auc_points, ee_breakdown, CurveNormalizer, GroupNormalizer};
use expexp_core::rng::stream_seed;
use expexp_core::{expected_exposure_mc, target_exposure, BrowsingModel, Policy};

use crate::error::{LtrError, Result};
use crate::scorer::Scorer;

/// One point of an evaluation sweep: a scorer sampled at softmax temperature
/// `temperature` (`α = 1/T`; `T = ∞` is the uniform policy).
#[derive(Debug, Clone, Copy)]
pub struct GridPoint<'a> {
    /// Label written to results (a temperature or a λ).
    pub param: f64,
    pub scorer: &'a Scorer,
    pub temperature: f64,
}

/// Sweeps one scorer over softmax temperatures.
pub fn temperature_grid<'a>(scorer: &'a Scorer, temperatures: &[f64]) -> Vec<GridPoint<'a>> {
    temperatures
        .iter()
        .map(|&t| GridPoint {
            param: t,
            scorer,
            temperature: t,
        })
        .collect()
}

/// One model per λ, each sampled at temperature 1.
pub fn lambda_grid<'a>(models: &'a [(f64, Scorer)]) -> Vec<GridPoint<'a>> {
    models
        .iter()
        .map(|(lambda, scorer)| GridPoint {
            param: *lambda,
            scorer,
            temperature: 1.0,
        })
        .collect()
}

/// Temperatures from near-deterministic to uniform, log-spaced.
pub fn default_temperatures() -> Vec<f64> {
    let mut t: Vec<f64> = (-3..=3).map(|k| 10f64.powi(k)).collect();
    t.push(f64::INFINITY);
    t
}

/// What the horizontal axis of the curve measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairnessView {
    /// Normalized individual disparity `‖ε‖²`.
    Individual,
    /// Normalized group disparity `‖Aᵀε‖²`.
    DemographicParity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    pub n_samples: usize,
    pub seed: u64,
    pub view: FairnessView,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub param: f64,
    pub disparity: f64,
    pub relevance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryCurve {
    pub query_id: String,
    pub points: Vec<CurvePoint>,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub per_query: Vec<QueryCurve>,
    /// Macro average over evaluated queries; NaN when none were.
    pub mean_auc: f64,
    /// Queries left out and why.
    pub skipped: Vec<(String, String)>,
}

/// Logits `s/T` with the documents in descending-logit order.
fn sorted_logits(scores: &[f64], temperature: f64) -> (Vec<usize>, Vec<f64>) {
    let mut base: Vec<usize> = (0..scores.len()).collect();
    base.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let logits = base
        .iter()
        .map(|&d| {
            if temperature.is_infinite() {
                0.0
            } else {
                scores[d] / temperature
            }
        })
        .collect();
    (base, logits)
}

/// The policy a scorer induces on one query at `temperature`.
pub fn scorer_policy(scorer: &Scorer, query: &LtrQuery, temperature: f64) -> Result<Policy> {
    if !(temperature > 0.0) {
        return Err(LtrError::Configuration(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let n = query.n_docs();
    let scores = scorer.score(&query.features, n);
    let (base, logits) = sorted_logits(&scores, temperature);
    Ok(Policy::plackett_luce_logits(base, &logits, n, n)?)
}

fn evaluate_query(
    grid: &[GridPoint<'_>],
    query: &LtrQuery,
    model: &BrowsingModel,
    settings: &EvalSettings,
) -> Result<std::result::Result<QueryCurve, String>> {
    let judgments = query.judgments();
    if judgments.num_relevant() == 0 {
        return Ok(Err("no relevant documents".into()));
    }
    let target = target_exposure(model, &judgments)?;
    let curve_norm = match CurveNormalizer::new(model, &judgments) {
        Ok(c) => c,
        Err(e) => return Ok(Err(e.to_string())),
    };
    let groups = match settings.view {
        FairnessView::Individual => None,
        FairnessView::DemographicParity => {
            let Some(g) = query.group_attribution() else {
                return Ok(Err("no group labels".into()));
            };
            let g = g?;
            match GroupNormalizer::new(model, &judgments, &g) {
                Ok(norm) => Some((g, norm)),
                Err(e) => return Ok(Err(e.to_string())),
            }
        }
    };
    let mut points = Vec::with_capacity(grid.len());
    for (i, gp) in grid.iter().enumerate() {
        let policy = scorer_policy(gp.scorer, query, gp.temperature)?;
        let seed = stream_seed(settings.seed, &query.query_id, i as u64);
        let eps = expected_exposure_mc(&policy, model, &judgments, settings.n_samples, seed)?;
        let ee = ee_breakdown(&eps, &target)?;
        let (d, r) = curve_norm.normalize(&ee)?;
        let disparity = match &groups {
            None => d,
            Some((g, norm)) => {
                norm.normalize(g.aggregate(eps.values()).iter().map(|x| x * x).sum())
            }
        };
        points.push(CurvePoint {
            param: gp.param,
            disparity,
            relevance: r,
        });
    }
    let coords: Vec<(f64, f64)> = points.iter().map(|p| (p.disparity, p.relevance)).collect();
    let auc = ee_auc_points(&coords)?;
    Ok(Ok(QueryCurve {
        query_id: query.query_id.clone(),
        points,
        auc,
    }))
}

/// Evaluates every query of `dataset` over `grid` with `n_samples` sampled
/// rankings per point. Queries without relevant documents, group labels (in
/// the group view) or a usable normalization are skipped with a warning.
pub fn evaluate_trained(
    grid: &[GridPoint<'_>],
    dataset: &LtrDataset,
    model: &BrowsingModel,
    settings: &EvalSettings,
) -> Result<Evaluation> {
    if grid.len() < 2 {
        return Err(LtrError::Configuration(
            "an evaluation sweep needs at least two grid points".into(),
        ));
    }
    if settings.n_samples == 0 {
        return Err(LtrError::Configuration("n_samples must be positive".into()));
    }
    let outcomes: Vec<_> = dataset
        .queries()
        .par_iter()
        .map(|q| evaluate_query(grid, q, model, settings))
        .collect::<Result<_>>()?;
    let mut per_query = Vec::new();
    let mut skipped = Vec::new();
    for (q, outcome) in dataset.queries().iter().zip(outcomes) {
        match outcome {
            Ok(c) => per_query.push(c),
            Err(reason) => {
                warn!("query `{}` skipped: {reason}", q.query_id);
                skipped.push((q.query_id.clone(), reason));
            }
        }
    }
    let mean_auc = if per_query.is_empty() {
        f64::NAN
    } else {
        per_query.iter().map(|c| c.auc).sum::<f64>() / per_query.len() as f64
    };
    Ok(Evaluation {
        per_query,
        mean_auc,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use expexp_core::dataset::LtrQuery;

    fn dataset() -> LtrDataset {
        let queries = (0..3)
            .map(|k| {
                let n = 6;
                LtrQuery {
                    query_id: format!("q{k}"),
                    doc_ids: (0..n).map(|i| format!("q{k}-{i}")).collect(),
                    features: (0..n).map(|i| (n - i) as f64 + 0.1 * k as f64).collect(),
                    grades: vec![2, 1, 1, 0, 0, 0],
                    groups: Some(vec![0, 1, 0, 1, 2, 2]),
                }
            })
            .collect();
        LtrDataset::new(1, queries).unwrap()
    }

    fn linear() -> Scorer {
        Scorer::from_parts(vec![1, 1], vec![1.0, 0.0], 0.0).unwrap()
    }

    #[test]
    fn temperature_endpoints() {
        let d = dataset();
        let s = linear();
        let grid = temperature_grid(&s, &[1e-9, f64::INFINITY]);
        let model = BrowsingModel::rbp(0.5).unwrap();
        let settings = EvalSettings {
            n_samples: 2000,
            seed: 1,
            view: FairnessView::Individual,
        };
        let ev = evaluate_trained(&grid, &d, &model, &settings).unwrap();
        assert_eq!(ev.per_query.len(), 3);
        for c in &ev.per_query {
            assert!((c.points[0].disparity - 1.0).abs() < 1e-9);
            assert!(c.points[1].disparity < 0.02, "{}", c.points[1].disparity);
        }
    }

    #[test]
    fn skips_queries_without_relevance() {
        let mut d = dataset();
        d.queries_mut()[1].grades = vec![0; 6];
        let s = linear();
        let grid = temperature_grid(&s, &[1.0, 10.0]);
        let model = BrowsingModel::rbp(0.5).unwrap();
        let settings = EvalSettings {
            n_samples: 10,
            seed: 1,
            view: FairnessView::DemographicParity,
        };
        let ev = evaluate_trained(&grid, &d, &model, &settings).unwrap();
        assert_eq!(ev.per_query.len(), 2);
        assert_eq!(ev.skipped[0].0, "q1");
        assert!(ev.mean_auc.is_finite());
    }

    #[test]
    fn evaluation_is_reproducible() {
        let d = dataset();
        let s = linear();
        let grid = temperature_grid(&s, &default_temperatures());
        let model = BrowsingModel::rbp(0.5).unwrap();
        let settings = EvalSettings {
            n_samples: 50,
            seed: 9,
            view: FairnessView::Individual,
        };
        let a = evaluate_trained(&grid, &d, &model, &settings).unwrap();
        let b = evaluate_trained(&grid, &d, &model, &settings).unwrap();
        assert_eq!(a, b);
    }
}
