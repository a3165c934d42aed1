use std::fmt;
use std::str::FromStr;

use log::warn;

use super::{Policy, ScoredRun};
use crate::error::{Error, Result};
use crate::exposure::{expected_exposure_mc, target_exposure};
use crate::judgments::RelevanceJudgments;
use crate::metrics::{ee_breakdown, CurveNormalizer, SweepCurve, SweepPoint};
use crate::model::BrowsingModel;
use crate::rng::stream_seed;

/// Randomization family swept to trace a disparity-relevance curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyFamily {
    /// Parameter α ≥ 0; 0 is uniform, large α recovers the static ranking.
    PlackettLuce,
    /// Parameter β ∈ (0,1]; 1 is the static ranking, β → 0 is uniform.
    RankTransposition,
}

impl PolicyFamily {
    pub fn build(
        self,
        run: &ScoredRun,
        judgments: &RelevanceJudgments,
        param: f64,
        rerank_depth: usize,
    ) -> Result<Policy> {
        match self {
            PolicyFamily::PlackettLuce => {
                Policy::plackett_luce(run, judgments, param, rerank_depth)
            }
            PolicyFamily::RankTransposition => {
                Policy::rank_transposition(run, judgments, param, rerank_depth)
            }
        }
    }

    pub fn default_grid(self) -> Vec<f64> {
        match self {
            PolicyFamily::PlackettLuce => vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            PolicyFamily::RankTransposition => vec![1.0, 0.5, 0.2, 0.1, 0.05, 0.01],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PolicyFamily::PlackettLuce => "pl",
            PolicyFamily::RankTransposition => "rt",
        }
    }
}

impl fmt::Display for PolicyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pl" => Ok(PolicyFamily::PlackettLuce),
            "rt" => Ok(PolicyFamily::RankTransposition),
            other => Err(Error::Configuration(format!(
                "unknown policy family `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: PolicyFamily,
    pub grid: Vec<f64>,
    pub n_samples: usize,
    pub rerank_depth: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub curve: SweepCurve,
    /// Grid points skipped because building or evaluating the policy failed.
    pub failures: usize,
}

/// Evaluates `family` at every grid parameter and assembles the normalized
/// disparity-relevance curve.
///
/// Grid point `i` draws its rankings from the stream `(seed, query, i)`, so a
/// curve does not depend on which other queries are evaluated.
pub fn sweep(
    run: &ScoredRun,
    judgments: &RelevanceJudgments,
    model: &BrowsingModel,
    config: &SweepConfig,
) -> Result<SweepOutcome> {
    if config.grid.is_empty() {
        return Err(Error::Configuration("sweep grid is empty".into()));
    }
    let judgments = run.pooled(judgments.clone());
    let target = target_exposure(model, &judgments)?;
    let normalizer = CurveNormalizer::new(model, &judgments)?;
    let mut points = Vec::with_capacity(config.grid.len());
    let mut failures = 0;
    let mut last_err = None;
    for (i, &param) in config.grid.iter().enumerate() {
        let seed = stream_seed(config.seed, run.query_id(), i as u64);
        let point = config
            .family
            .build(run, &judgments, param, config.rerank_depth)
            .and_then(|policy| {
                expected_exposure_mc(&policy, model, &judgments, config.n_samples, seed)
            })
            .and_then(|exposure| ee_breakdown(&exposure, &target))
            .and_then(|ee| {
                let (d_norm, r_norm) = normalizer.normalize(&ee)?;
                Ok(SweepPoint {
                    param: Some(param),
                    breakdown: ee,
                    d_norm,
                    r_norm,
                })
            });
        match point {
            Ok(p) => points.push(p),
            Err(e) => {
                warn!(
                    "query {}: {} parameter {param} skipped: {e}",
                    run.query_id(),
                    config.family
                );
                failures += 1;
                last_err = Some(e);
            }
        }
    }
    if points.is_empty() {
        return Err(last_err.expect("at least one grid point failed"));
    }
    Ok(SweepOutcome {
        curve: SweepCurve::new(points),
        failures,
    })
}
