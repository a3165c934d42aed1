//! Per-query loss and gradient, and the training loop.

use log::{info, warn};
use rand::seq::SliceRandom;

use expexp_core::dataset::{LtrDataset, LtrQuery};
use expexp_core::metrics::GroupAttribution;
use expexp_core::rng::stream;
use expexp_core::{target_exposure, BrowsingModel};

use crate::error::{LtrError, Result};
use crate::objective::{
    ee_objective, ee_objective_grad, group_objective, group_objective_grad, pairwise_loss,
    pointwise_loss, Objective,
};
use crate::optim::{Optimizer, OptimizerKind};
use crate::scorer::Scorer;
use crate::surrogate::{gumbel_noise, sample_backward, sample_forward, ExposureMode};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub objective: Objective,
    /// Disparity weight λ ∈ [0, 1] of the stochastic objectives.
    pub lambda: f64,
    /// Smooth-rank temperature τ.
    pub tau: f64,
    /// Gumbel samples per query per step.
    pub n_train_samples: usize,
    /// Sampled rankings per query at validation and evaluation.
    pub n_test_samples: usize,
    pub learning_rate: f64,
    pub dropout: f64,
    /// Hidden layer widths; empty for a linear scorer.
    pub hidden: Vec<usize>,
    pub epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub optimizer: OptimizerKind,
    pub exposure_mode: ExposureMode,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            objective: Objective::ExpectedExposure,
            lambda: 0.5,
            tau: 0.1,
            n_train_samples: 20,
            n_test_samples: 50,
            learning_rate: 0.001,
            dropout: 0.1,
            hidden: vec![256, 256],
            epochs: 100,
            patience: 10,
            optimizer: OptimizerKind::Sgd,
            exposure_mode: ExposureMode::StraightThrough,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LtrError::Configuration(m));
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad(format!("λ must lie in [0, 1], got {}", self.lambda));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("τ must be positive, got {}", self.tau));
        }
        if self.n_train_samples == 0 || self.n_test_samples == 0 {
            return bad("sample counts must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.epochs == 0 {
            return bad("epochs must be positive".into());
        }
        Ok(())
    }
}

/// A query prepared for training: its features plus the fixed target.
#[derive(Debug, Clone)]
pub struct QueryProblem {
    pub query_id: String,
    pub n_docs: usize,
    pub features: Vec<f64>,
    pub grades: Vec<u32>,
    pub target: Vec<f64>,
    pub groups: Option<GroupAttribution>,
}

impl QueryProblem {
    pub fn new(query: &LtrQuery, model: &BrowsingModel) -> Result<Self> {
        let judgments = query.judgments();
        let target = target_exposure(model, &judgments)?.into_values();
        Ok(QueryProblem {
            query_id: query.query_id.clone(),
            n_docs: query.n_docs(),
            features: query.features.clone(),
            grades: query.grades.clone(),
            target,
            groups: query.group_attribution().transpose()?,
        })
    }
}

/// Prepares every nonempty query, warning about and skipping empty ones.
pub fn prepare(dataset: &LtrDataset, model: &BrowsingModel) -> Result<Vec<QueryProblem>> {
    let mut out = Vec::with_capacity(dataset.len());
    for q in dataset.queries() {
        if q.n_docs() == 0 {
            warn!("query `{}` has no documents; skipped", q.query_id);
            continue;
        }
        out.push(QueryProblem::new(q, model)?);
    }
    Ok(out)
}

/// Settings of [`query_loss`] other than the objective.
#[derive(Debug, Clone, Copy)]
pub struct LossSettings<'a> {
    pub objective: Objective,
    pub lambda: f64,
    pub tau: f64,
    pub model: &'a BrowsingModel,
    pub mode: ExposureMode,
}

/// Loss of one query and its gradient with respect to the scores.
///
/// Stochastic objectives average exposure over the given Gumbel draws
/// (`noise[k]` is one draw per document), which are held fixed.
pub fn query_loss(
    scores: &[f64],
    noise: &[Vec<f64>],
    problem: &QueryProblem,
    settings: &LossSettings<'_>,
) -> Result<(f64, Vec<f64>)> {
    match settings.objective {
        Objective::Pointwise => return Ok(pointwise_loss(scores, &problem.grades)),
        Objective::Pairwise => return Ok(pairwise_loss(scores, &problem.grades)),
        _ => {}
    }
    if noise.is_empty() {
        return Err(LtrError::Configuration(
            "stochastic objective needs noise draws".into(),
        ));
    }
    let groups = match settings.objective {
        Objective::GroupParity => Some(problem.groups.as_ref().ok_or_else(|| {
            LtrError::Configuration(format!(
                "group objective needs group labels for query `{}`",
                problem.query_id
            ))
        })?),
        _ => None,
    };
    let n = scores.len();
    let k = noise.len() as f64;
    let traces: Vec<_> = noise
        .iter()
        .map(|g| {
            sample_forward(
                scores,
                g,
                &problem.grades,
                settings.model,
                settings.tau,
                settings.mode,
            )
        })
        .collect();
    let mut exposure = vec![0.0; n];
    for t in &traces {
        for (e, v) in exposure.iter_mut().zip(&t.exposure.values) {
            *e += v / k;
        }
    }
    let (loss, grad_e) = match groups {
        Some(g) => (
            group_objective(&exposure, g, &problem.target, settings.lambda),
            group_objective_grad(&exposure, g, &problem.target, settings.lambda),
        ),
        None => (
            ee_objective(&exposure, &problem.target, settings.lambda),
            ee_objective_grad(&exposure, &problem.target, settings.lambda),
        ),
    };
    let per_sample: Vec<f64> = grad_e.iter().map(|g| g / k).collect();
    let mut grad = vec![0.0; n];
    for t in &traces {
        for (a, b) in grad
            .iter_mut()
            .zip(sample_backward(t, settings.tau, &per_sample))
        {
            *a += b;
        }
    }
    Ok((loss, grad))
}

pub fn draw_noise<R: rand::Rng + ?Sized>(
    n_docs: usize,
    n_samples: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    (0..n_samples).map(|_| gumbel_noise(n_docs, rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Parameters from the epoch with the lowest validation loss.
    pub scorer: Scorer,
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
    /// Loss of every update in order, for monitoring.
    pub step_losses: Vec<f64>,
}

/// Mean loss over `problems` with dropout off and noise from a fixed stream,
/// so repeated calls on the same scorer agree.
pub fn validation_loss(
    scorer: &Scorer,
    problems: &[QueryProblem],
    settings: &LossSettings<'_>,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if problems.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for p in problems {
        let scores = scorer.score(&p.features, p.n_docs);
        let noise = if settings.objective.is_stochastic() {
            draw_noise(p.n_docs, n_samples, &mut stream(seed, &p.query_id, 1))
        } else {
            Vec::new()
        };
        total += query_loss(&scores, &noise, p, settings)?.0;
    }
    Ok(total / problems.len() as f64)
}

fn diagnostics(scorer: &Scorer, scores: &[f64], grad: &[f64]) -> String {
    let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
    let range = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            })
    };
    let norm = scorer.params().iter().map(|p| p * p).sum::<f64>().sqrt();
    format!(
        "  parameter norm: {norm:e}\n  scores finite: {}, range: {:?}\n  gradient finite: {}, range: {:?}",
        finite(scores),
        range(scores),
        finite(grad),
        range(grad)
    )
}

/// Trains a scorer on `train`, early-stopping on `valid` (or on the training
/// loss when `valid` is empty), and returns the best-validation parameters.
pub fn train(
    train: &LtrDataset,
    valid: &LtrDataset,
    model: &BrowsingModel,
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    let problems = prepare(train, model)?;
    let valid_problems = prepare(valid, model)?;
    if problems.is_empty() {
        return Err(LtrError::Configuration("no training queries".into()));
    }
    if config.objective == Objective::GroupParity
        && problems
            .iter()
            .chain(&valid_problems)
            .any(|p| p.groups.is_none())
    {
        return Err(LtrError::Configuration(
            "group objective needs group labels for every query".into(),
        ));
    }
    let settings = LossSettings {
        objective: config.objective,
        lambda: config.lambda,
        tau: config.tau,
        model,
        mode: config.exposure_mode,
    };
    let mut init_rng = stream(config.seed, "init", 0);
    let mut scorer = Scorer::new(
        train.n_features(),
        &config.hidden,
        config.dropout,
        &mut init_rng,
    )?;
    let mut optimizer = Optimizer::new(
        config.optimizer,
        config.learning_rate,
        scorer.params().len(),
    );
    let mut best = scorer.clone();
    let mut best_loss = f64::INFINITY;
    let mut best_epoch = 0;
    let mut history = Vec::new();
    let mut step_losses = Vec::new();
    let mut order: Vec<usize> = (0..problems.len()).collect();
    let mut since_best = 0;
    for epoch in 0..config.epochs {
        let mut rng = stream(config.seed, "epoch", epoch as u64);
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &qi in &order {
            let p = &problems[qi];
            let (scores, cache) = scorer.forward_train(&p.features, p.n_docs, &mut rng);
            let noise = if config.objective.is_stochastic() {
                draw_noise(p.n_docs, config.n_train_samples, &mut rng)
            } else {
                Vec::new()
            };
            let (loss, grad) = query_loss(&scores, &noise, p, &settings)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(LtrError::Divergence {
                    epoch,
                    query: p.query_id.clone(),
                    loss,
                    diagnostics: diagnostics(&scorer, &scores, &grad),
                });
            }
            total += loss;
            step_losses.push(loss);
            let param_grad = scorer.backward(&cache, &grad);
            optimizer.step(scorer.params_mut(), &param_grad);
        }
        let train_loss = total / problems.len() as f64;
        let valid_loss = if valid_problems.is_empty() {
            train_loss
        } else {
            validation_loss(
                &scorer,
                &valid_problems,
                &settings,
                config.n_test_samples,
                config.seed,
            )?
        };
        if !valid_loss.is_finite() {
            return Err(LtrError::Divergence {
                epoch,
                query: "<validation>".into(),
                loss: valid_loss,
                diagnostics: diagnostics(&scorer, &[], &[]),
            });
        }
        history.push(EpochStats {
            epoch,
            train_loss,
            valid_loss,
        });
        info!(
            "{} λ={} epoch {epoch}: train {train_loss:.6} valid {valid_loss:.6}",
            config.objective, config.lambda
        );
        if valid_loss < best_loss {
            best_loss = valid_loss;
            best = scorer.clone();
            best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                break;
            }
        }
    }
    Ok(TrainReport {
        scorer: best,
        history,
        best_epoch,
        step_losses,
    })
}
