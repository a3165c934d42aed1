//! `train`: fit scorers on a feature file, evaluate them on a held-out
//! split, and tabulate EE-AUC per objective.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{info, warn};
use rayon::prelude::*;

use expexp_core::dataset::{LtrDataset, MinMaxScaler};
use expexp_core::io::{
    fmt_sig6, macro_average_auc, parse_features, parse_groups, write_auc_rows, AucRow,
};
use expexp_core::BrowsingModel;
use expexp_ltr::evaluate::{default_temperatures, lambda_grid, temperature_grid};
use expexp_ltr::{
    evaluate_trained, train, Checkpoint, EvalSettings, Evaluation, FairnessView, LtrError,
    Objective, OptimizerKind, Scorer, TrainConfig, TrainReport,
};

use crate::args::TrainArgs;
use crate::config::{ConfigFile, ModelSettings, DEFAULT_OUT, DEFAULT_SAMPLES};
use crate::{create_out_dir, write_file};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSettings {
    pub features: PathBuf,
    pub groups: Option<PathBuf>,
    pub experiment: Experiment,
    pub model: ModelSettings,
    /// Train and validation fractions.
    pub split: (f64, f64),
    pub out: PathBuf,
}

/// Everything that shapes training and evaluation once data is loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub objectives: Vec<Objective>,
    pub lambdas: Vec<f64>,
    pub temperatures: Vec<f64>,
    /// Objective and λ are overwritten per model.
    pub base: TrainConfig,
    pub seed: u64,
}

fn default_lambdas() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl TrainSettings {
    pub fn resolve(args: &TrainArgs, file: &ConfigFile) -> Result<Self> {
        let features = file
            .path(args.features.clone(), "features")
            .context("--features is required")?;
        let objectives = file
            .list(args.objective.clone(), "objective")?
            .unwrap_or_else(|| vec![Objective::ExpectedExposure]);
        if objectives.is_empty() {
            bail!("--objective is empty");
        }
        let lambdas = file
            .list(args.lambda.clone(), "lambda")?
            .unwrap_or_else(default_lambdas);
        if lambdas.is_empty() {
            bail!("--lambda is empty");
        }
        let temperatures = file
            .list(args.grid.clone(), "grid")?
            .unwrap_or_else(default_temperatures);
        if temperatures.len() < 2 {
            bail!("--grid needs at least two temperatures");
        }
        let d = TrainConfig::default();
        let split: Vec<f64> = file
            .list(args.split.clone(), "split")?
            .unwrap_or(vec![0.6, 0.2]);
        let split = match split[..] {
            [t, v] if t > 0.0 && v >= 0.0 && t + v < 1.0 => (t, v),
            _ => bail!("--split takes two fractions (train, validation) summing below 1"),
        };
        let seed = file.get(args.common.seed, "seed", 0)?;
        let base = TrainConfig {
            tau: file.get(args.tau, "tau", d.tau)?,
            n_train_samples: file.get(args.train_samples, "train-samples", d.n_train_samples)?,
            n_test_samples: file.get(args.samples, "samples", DEFAULT_SAMPLES)?,
            learning_rate: file.get(args.learning_rate, "learning-rate", d.learning_rate)?,
            dropout: file.get(args.dropout, "dropout", d.dropout)?,
            hidden: file
                .list(args.hidden.clone(), "hidden")?
                .unwrap_or(d.hidden.clone()),
            epochs: file.get(args.epochs, "epochs", d.epochs)?,
            patience: file.get(args.patience, "patience", d.patience)?,
            optimizer: file
                .get(
                    args.optimizer.clone(),
                    "optimizer",
                    d.optimizer.name().to_string(),
                )?
                .parse::<OptimizerKind>()?,
            seed,
            ..d
        };
        base.validate()?;
        for &l in &lambdas {
            TrainConfig {
                lambda: l,
                ..base.clone()
            }
            .validate()?;
        }
        Ok(TrainSettings {
            features,
            groups: file.path(args.groups.clone(), "groups"),
            experiment: Experiment {
                objectives,
                lambdas,
                temperatures,
                base,
                seed,
            },
            model: ModelSettings::resolve(&args.model, file)?,
            split,
            out: file
                .path(args.common.out.clone(), "out")
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        })
    }
}

/// Scaled train/validation/test splits; the scaler is fitted on train.
#[derive(Debug, Clone)]
pub struct Splits {
    pub train: LtrDataset,
    pub valid: LtrDataset,
    pub test: LtrDataset,
    pub scaler: MinMaxScaler,
}

pub fn make_splits(data: &LtrDataset, split: (f64, f64), seed: u64) -> Splits {
    let (mut train, mut valid, mut test) = data.split(split.0, split.1, seed);
    let scaler = MinMaxScaler::fit(&train);
    scaler.apply(&mut train);
    scaler.apply(&mut valid);
    scaler.apply(&mut test);
    Splits {
        train,
        valid,
        test,
        scaler,
    }
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub lambda: Option<f64>,
    pub report: TrainReport,
}

#[derive(Debug, Clone)]
pub struct ObjectiveResult {
    pub objective: Objective,
    pub models: Vec<TrainedModel>,
    /// Individual-fairness curves on the test split.
    pub individual: Evaluation,
    /// Demographic-parity curves, when the data has groups.
    pub parity: Option<Evaluation>,
}

/// Trains one model per (objective, λ) and evaluates each objective's sweep:
/// ee/group models across λ (each sampled at temperature 1), pointwise and
/// pairwise models across softmax temperatures. A stochastic objective with
/// a single λ is swept across temperatures instead.
pub fn run_experiment(
    splits: &Splits,
    model: &BrowsingModel,
    exp: &Experiment,
) -> expexp_ltr::Result<Vec<ObjectiveResult>> {
    let jobs: Vec<(Objective, Option<f64>)> = exp
        .objectives
        .iter()
        .flat_map(|&o| {
            if o.is_stochastic() {
                exp.lambdas.iter().map(|&l| (o, Some(l))).collect()
            } else {
                vec![(o, None)]
            }
        })
        .collect();
    let reports: Vec<expexp_ltr::Result<TrainReport>> = jobs
        .par_iter()
        .map(|&(objective, lambda)| {
            let cfg = TrainConfig {
                objective,
                lambda: lambda.unwrap_or(exp.base.lambda),
                ..exp.base.clone()
            };
            train(&splits.train, &splits.valid, model, &cfg)
        })
        .collect();
    let mut trained: Vec<(Objective, TrainedModel)> = Vec::new();
    for ((objective, lambda), r) in jobs.into_iter().zip(reports) {
        let report = r?;
        info!("{objective} λ={lambda:?}: best epoch {}", report.best_epoch);
        trained.push((objective, TrainedModel { lambda, report }));
    }
    let has_groups = splits.test.has_groups();
    let settings = EvalSettings {
        n_samples: exp.base.n_test_samples,
        seed: exp.seed,
        view: FairnessView::Individual,
    };
    let mut out = Vec::new();
    for &objective in &exp.objectives {
        let models: Vec<TrainedModel> = trained
            .iter()
            .filter(|(o, _)| *o == objective)
            .map(|(_, m)| m.clone())
            .collect();
        let by_lambda: Vec<(f64, Scorer)> = models
            .iter()
            .filter_map(|m| m.lambda.map(|l| (l, m.report.scorer.clone())))
            .collect();
        let grid = if by_lambda.len() >= 2 {
            lambda_grid(&by_lambda)
        } else {
            temperature_grid(&models[0].report.scorer, &exp.temperatures)
        };
        let individual = evaluate_trained(&grid, &splits.test, model, &settings)?;
        let parity = has_groups
            .then(|| {
                let s = EvalSettings {
                    view: FairnessView::DemographicParity,
                    ..settings
                };
                evaluate_trained(&grid, &splits.test, model, &s)
            })
            .transpose()?;
        out.push(ObjectiveResult {
            objective,
            models,
            individual,
            parity,
        });
    }
    Ok(out)
}

fn load_dataset(settings: &TrainSettings) -> Result<LtrDataset> {
    let path = &settings.features;
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let parsed = parse_features(f).with_context(|| format!("parsing {}", path.display()))?;
    for q in &parsed.dropped_queries {
        warn!("query `{q}` has no feature lines; dropped");
    }
    let mut data = parsed.dataset;
    if let Some(g) = &settings.groups {
        let f = std::fs::File::open(g).with_context(|| format!("opening {}", g.display()))?;
        let rows = parse_groups(f).with_context(|| format!("parsing {}", g.display()))?;
        data.attach_groups(
            rows.iter()
                .map(|r| (r.query.as_str(), r.doc.as_str(), r.group.as_str())),
        )?;
    }
    Ok(data)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn manifest(settings: &TrainSettings, splits: &Splits, results: &[ObjectiveResult]) -> String {
    let e = &settings.experiment;
    let c = &e.base;
    let mut m = String::new();
    let mut line = |k: &str, v: String| writeln!(m, "{k} = {v}").expect("string write");
    line("command", "train".into());
    line("features", settings.features.display().to_string());
    line(
        "groups",
        settings
            .groups
            .as_ref()
            .map_or("none".into(), |p| p.display().to_string()),
    );
    line("seed", e.seed.to_string());
    line(
        "split",
        format!("{},{}", settings.split.0, settings.split.1),
    );
    line(
        "queries",
        format!(
            "train {}, valid {}, test {}",
            splits.train.len(),
            splits.valid.len(),
            splits.test.len()
        ),
    );
    line("objective", join(&e.objectives));
    line("lambda", join(&e.lambdas));
    line("grid", join(&e.temperatures));
    line("model", settings.model.describe());
    line("tau", c.tau.to_string());
    line("train-samples", c.n_train_samples.to_string());
    line("samples", c.n_test_samples.to_string());
    line("learning-rate", c.learning_rate.to_string());
    line("dropout", c.dropout.to_string());
    line(
        "hidden",
        if c.hidden.is_empty() {
            "none (linear)".into()
        } else {
            let n = c.hidden.len();
            format!(
                "{} ({n} hidden layer{})",
                join(&c.hidden),
                if n == 1 { "" } else { "s" }
            )
        },
    );
    line("optimizer", c.optimizer.name().into());
    line("epochs", c.epochs.to_string());
    line("patience", c.patience.to_string());
    for r in results {
        for tm in &r.models {
            let key = match tm.lambda {
                Some(l) => format!("best-epoch {} lambda={l}", r.objective),
                None => format!("best-epoch {}", r.objective),
            };
            line(&key, tm.report.best_epoch.to_string());
        }
    }
    m
}

fn checkpoint_name(objective: Objective, lambda: Option<f64>) -> String {
    match lambda {
        Some(l) => format!("model-{objective}-lambda{l}.json"),
        None => format!("model-{objective}.json"),
    }
}

fn auc_rows(objective: Objective, ev: &Evaluation) -> Vec<AucRow> {
    ev.per_query
        .iter()
        .map(|c| AucRow {
            query: c.query_id.clone(),
            policy: objective.name().into(),
            ee_auc: c.auc,
        })
        .collect()
}

fn table(results: &[ObjectiveResult]) -> String {
    let mut t = String::from("objective,ee_auc,dp_auc\n");
    for r in results {
        let dp = r
            .parity
            .as_ref()
            .map_or(String::new(), |p| fmt_sig6(p.mean_auc));
        writeln!(
            t,
            "{},{},{dp}",
            r.objective,
            fmt_sig6(r.individual.mean_auc)
        )
        .expect("string write");
    }
    t
}

fn curves(results: &[ObjectiveResult]) -> String {
    let mut t = String::from("query,objective,view,param,disparity,relevance\n");
    for r in results {
        let views = [
            ("individual", Some(&r.individual)),
            ("parity", r.parity.as_ref()),
        ];
        for (view, ev) in views {
            let Some(ev) = ev else { continue };
            for c in &ev.per_query {
                for p in &c.points {
                    writeln!(
                        t,
                        "{},{},{view},{},{},{}",
                        c.query_id,
                        r.objective,
                        fmt_sig6(p.param),
                        fmt_sig6(p.disparity),
                        fmt_sig6(p.relevance)
                    )
                    .expect("string write");
                }
            }
        }
    }
    t
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    write_file(dir, name, |w| std::io::Write::write_all(w, text.as_bytes()))
}

pub fn run(settings: &TrainSettings) -> Result<Vec<PathBuf>> {
    let data = load_dataset(settings)?;
    let exp = &settings.experiment;
    if exp.objectives.contains(&Objective::GroupParity) && !data.has_groups() {
        bail!("the group objective needs group labels (--groups)");
    }
    let max_grade = data
        .queries()
        .iter()
        .flat_map(|q| q.grades.iter().copied())
        .max()
        .unwrap_or(1);
    let model = settings.model.build(max_grade)?;
    let splits = make_splits(&data, settings.split, exp.seed);
    if splits.train.is_empty() || splits.test.is_empty() {
        bail!(
            "split {:?} of {} queries leaves an empty train or test set",
            settings.split,
            data.len()
        );
    }
    create_out_dir(&settings.out)?;
    let results = match run_experiment(&splits, &model, exp) {
        Ok(r) => r,
        Err(e @ LtrError::Divergence { .. }) => {
            let path = write_text(&settings.out, "divergence.txt", &format!("{e}\n"))?;
            return Err(
                anyhow::Error::new(e).context(format!("diagnostics written to {}", path.display()))
            );
        }
        Err(e) => return Err(e.into()),
    };
    let mut files = Vec::new();
    for r in &results {
        for tm in &r.models {
            let ckpt = Checkpoint::new(
                &tm.report.scorer,
                Some(&splits.scaler),
                Some(r.objective),
                tm.lambda,
            );
            files.push(write_file(
                &settings.out,
                &checkpoint_name(r.objective, tm.lambda),
                |w| ckpt.save(w),
            )?);
        }
    }
    let mut auc: Vec<AucRow> = results
        .iter()
        .flat_map(|r| auc_rows(r.objective, &r.individual))
        .collect();
    auc.extend(macro_average_auc(&auc));
    files.push(write_file(&settings.out, "auc.csv", |w| {
        write_auc_rows(w, &auc)
    })?);
    if results.iter().any(|r| r.parity.is_some()) {
        let mut dp: Vec<AucRow> = results
            .iter()
            .filter_map(|r| r.parity.as_ref().map(|p| auc_rows(r.objective, p)))
            .flatten()
            .collect();
        dp.extend(macro_average_auc(&dp));
        files.push(write_file(&settings.out, "auc_dp.csv", |w| {
            write_auc_rows(w, &dp)
        })?);
    }
    files.push(write_text(&settings.out, "curves.csv", &curves(&results))?);
    files.push(write_text(&settings.out, "table.csv", &table(&results))?);
    files.push(write_text(
        &settings.out,
        "manifest.txt",
        &manifest(settings, &splits, &results),
    )?);
    Ok(files)
}
