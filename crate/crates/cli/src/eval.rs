//! `eval` and `sweep`: metrics of runs randomized by a policy.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{debug, warn};
use rayon::prelude::*;

use expexp_core::io::{
    macro_average_auc, macro_average_eval, parse_qrels, parse_run, write_auc_rows, write_eval_rows,
    write_static_rows, AucRow, EvalRow, StaticRow,
};
use expexp_core::metrics::{
    ee_auc, ee_breakdown, expected_static_metrics, CurveNormalizer, StaticExpectation,
};
use expexp_core::policies::{sweep, SweepConfig};
use expexp_core::rng::stream_seed;
use expexp_core::{
    expected_exposure_mc, target_exposure, BrowsingModel, Policy, PolicyFamily, RelevanceJudgments,
    ScoredRun,
};

use crate::args::EvalArgs;
use crate::config::{
    ConfigFile, ModelSettings, DEFAULT_OUT, DEFAULT_RERANK_DEPTH, DEFAULT_SAMPLES,
};
use crate::{create_out_dir, write_file, Skipped};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Det,
    Pl,
    Rt,
    Oracle,
}

impl std::str::FromStr for PolicyKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "det" => PolicyKind::Det,
            "pl" => PolicyKind::Pl,
            "rt" => PolicyKind::Rt,
            "oracle" => PolicyKind::Oracle,
            other => bail!("unknown policy `{other}` (expected det, pl, rt or oracle)"),
        })
    }
}

impl PolicyKind {
    fn family(self) -> Option<PolicyFamily> {
        match self {
            PolicyKind::Pl => Some(PolicyFamily::PlackettLuce),
            PolicyKind::Rt => Some(PolicyFamily::RankTransposition),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            PolicyKind::Det => "det",
            PolicyKind::Pl => "pl",
            PolicyKind::Rt => "rt",
            PolicyKind::Oracle => "oracle",
        }
    }
}

/// Resolved settings shared by `eval` and `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSettings {
    pub run: PathBuf,
    pub qrels: PathBuf,
    pub policies: Vec<PolicyKind>,
    pub grid: Option<Vec<f64>>,
    pub samples: usize,
    pub rerank_depth: usize,
    pub static_metrics: bool,
    pub model: ModelSettings,
    pub seed: u64,
    pub out: PathBuf,
}

impl EvalSettings {
    pub fn resolve(args: &EvalArgs, file: &ConfigFile, sweeping: bool) -> Result<Self> {
        let run = file
            .path(args.run.clone(), "run")
            .context("--run is required")?;
        let qrels = file
            .path(args.qrels.clone(), "qrels")
            .context("--qrels is required")?;
        let default_policy = if sweeping { "pl" } else { "det" };
        let policies: Vec<PolicyKind> = file
            .list(args.policy.clone(), "policy")?
            .unwrap_or_else(|| vec![default_policy.parse().expect("valid default")]);
        if policies.is_empty() {
            bail!("--policy is empty");
        }
        if sweeping {
            if let Some(p) = policies.iter().find(|p| p.family().is_none()) {
                bail!(
                    "sweep needs a randomized policy family (pl or rt), got `{}`",
                    p.name()
                );
            }
        } else if policies.len() != 1 {
            bail!("eval takes a single --policy");
        }
        let grid = file.list(args.grid.clone(), "grid")?;
        if grid.as_ref().is_some_and(|g| g.is_empty()) {
            bail!("--grid is empty");
        }
        let samples = file.get(args.samples, "samples", DEFAULT_SAMPLES)?;
        if samples == 0 {
            bail!("--samples must be positive");
        }
        Ok(EvalSettings {
            run,
            qrels,
            policies,
            grid,
            samples,
            rerank_depth: file.get(args.rerank_depth, "rerank-depth", DEFAULT_RERANK_DEPTH)?,
            static_metrics: file.flag(args.static_metrics, "static-metrics")?,
            model: ModelSettings::resolve(&args.model, file)?,
            seed: file.get(args.common.seed, "seed", 0)?,
            out: file
                .path(args.common.out.clone(), "out")
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        })
    }

    fn grid_for(&self, family: PolicyFamily) -> Vec<f64> {
        self.grid.clone().unwrap_or_else(|| family.default_grid())
    }
}

/// Runs and judgments paired by query, in query order.
pub struct Inputs {
    pub pairs: Vec<(ScoredRun, RelevanceJudgments)>,
    pub model: BrowsingModel,
    pub skipped: Vec<Skipped>,
}

pub fn load_inputs(run: &Path, qrels: &Path, model: &ModelSettings) -> Result<Inputs> {
    let open =
        |p: &Path| std::fs::File::open(p).with_context(|| format!("opening {}", p.display()));
    let runs = parse_run(open(run)?).with_context(|| format!("parsing {}", run.display()))?;
    let q = parse_qrels(open(qrels)?).with_context(|| format!("parsing {}", qrels.display()))?;
    if q.clamped > 0 {
        warn!("{} negative grades clamped to 0", q.clamped);
    }
    let max_grade = q
        .judgments
        .values()
        .map(|j| j.max_grade())
        .max()
        .unwrap_or(1);
    let model = model.build(max_grade)?;
    let mut judgments: BTreeMap<String, RelevanceJudgments> = q.judgments;
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for (qid, r) in runs {
        match judgments.remove(&qid) {
            Some(j) => {
                let pooled = r.pooled(j);
                pairs.push((r, pooled));
            }
            None => {
                debug!("query `{qid}` has no judgments; skipped");
                skipped.push(Skipped::new(qid, "missing from qrels"));
            }
        }
    }
    Ok(Inputs {
        pairs,
        model,
        skipped,
    })
}

fn check_relevance(j: &RelevanceJudgments) -> std::result::Result<(), String> {
    if j.num_relevant() == 0 {
        Err("empty relevance: no relevant documents".into())
    } else {
        Ok(())
    }
}

struct QueryOutput {
    eval: Vec<EvalRow>,
    auc: Vec<AucRow>,
    statics: Vec<StaticRow>,
}

fn static_row(qid: &str, policy: &str, param: Option<f64>, s: StaticExpectation) -> StaticRow {
    StaticRow {
        query: qid.to_string(),
        policy: policy.to_string(),
        param,
        rbp: s.rbp,
        err: s.err,
    }
}

fn eval_query(
    run: &ScoredRun,
    judgments: &RelevanceJudgments,
    model: &BrowsingModel,
    s: &EvalSettings,
) -> Result<std::result::Result<QueryOutput, String>> {
    if let Err(reason) = check_relevance(judgments) {
        return Ok(Err(reason));
    }
    let normalizer = match CurveNormalizer::new(model, judgments) {
        Ok(n) => n,
        Err(e) => return Ok(Err(e.to_string())),
    };
    let target = target_exposure(model, judgments)?;
    let kind = s.policies[0];
    let settings: Vec<(Option<f64>, Policy)> = match kind.family() {
        None => {
            let policy = match kind {
                PolicyKind::Det => Policy::static_run(run, judgments)?,
                _ => Policy::oracle(judgments),
            };
            vec![(None, policy)]
        }
        Some(f) => s
            .grid_for(f)
            .into_iter()
            .map(|p| Ok((Some(p), f.build(run, judgments, p, s.rerank_depth)?)))
            .collect::<Result<_>>()?,
    };
    let mut out = QueryOutput {
        eval: Vec::new(),
        auc: Vec::new(),
        statics: Vec::new(),
    };
    for (i, (param, policy)) in settings.iter().enumerate() {
        let seed = stream_seed(s.seed, run.query_id(), i as u64);
        let eps = expected_exposure_mc(policy, model, judgments, s.samples, seed)?;
        let ee = ee_breakdown(&eps, &target)?;
        let (d, r) = normalizer.normalize(&ee)?;
        out.eval
            .push(EvalRow::new(run.query_id(), kind.name(), *param, &ee, d, r));
        if s.static_metrics {
            // a point mass needs one draw, and one draw keeps it exact
            let n = if matches!(policy, Policy::Deterministic(_)) {
                1
            } else {
                s.samples
            };
            let st = expected_static_metrics(policy, model, judgments, n, seed)?;
            out.statics
                .push(static_row(run.query_id(), kind.name(), *param, st));
        }
    }
    Ok(Ok(out))
}

fn sweep_query(
    run: &ScoredRun,
    judgments: &RelevanceJudgments,
    model: &BrowsingModel,
    s: &EvalSettings,
) -> Result<std::result::Result<QueryOutput, String>> {
    if let Err(reason) = check_relevance(judgments) {
        return Ok(Err(reason));
    }
    if let Err(e) = CurveNormalizer::new(model, judgments) {
        return Ok(Err(e.to_string()));
    }
    let mut out = QueryOutput {
        eval: Vec::new(),
        auc: Vec::new(),
        statics: Vec::new(),
    };
    if s.static_metrics {
        let det = Policy::static_run(run, judgments)?;
        let st = expected_static_metrics(&det, model, judgments, 1, 0)?;
        out.statics
            .push(static_row(run.query_id(), "det", None, st));
    }
    for kind in &s.policies {
        let family = kind.family().expect("validated");
        let config = SweepConfig {
            family,
            grid: s.grid_for(family),
            n_samples: s.samples,
            rerank_depth: s.rerank_depth,
            seed: s.seed,
        };
        let outcome = sweep(run, judgments, model, &config)?;
        if outcome.failures > 0 {
            warn!(
                "query `{}`: {} {family} grid points failed",
                run.query_id(),
                outcome.failures
            );
        }
        for p in outcome.curve.points() {
            out.eval.push(EvalRow::new(
                run.query_id(),
                family.name(),
                p.param,
                &p.breakdown,
                p.d_norm,
                p.r_norm,
            ));
        }
        out.auc.push(AucRow {
            query: run.query_id().to_string(),
            policy: family.name().to_string(),
            ee_auc: ee_auc(&outcome.curve)?,
        });
        if s.static_metrics {
            for (i, &param) in config.grid.iter().enumerate() {
                let policy = family.build(run, judgments, param, s.rerank_depth)?;
                let seed = stream_seed(s.seed, run.query_id(), i as u64);
                let st = expected_static_metrics(&policy, model, judgments, s.samples, seed)?;
                out.statics
                    .push(static_row(run.query_id(), family.name(), Some(param), st));
            }
        }
    }
    Ok(Ok(out))
}

/// Summary of one `eval` or `sweep` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub evaluated: usize,
    pub skipped: Vec<Skipped>,
    pub files: Vec<PathBuf>,
}

pub fn run(settings: &EvalSettings, sweeping: bool) -> Result<Report> {
    let inputs = load_inputs(&settings.run, &settings.qrels, &settings.model)?;
    let model = &inputs.model;
    let outcomes: Vec<_> = inputs
        .pairs
        .par_iter()
        .map(|(r, j)| {
            let res = if sweeping {
                sweep_query(r, j, model, settings)
            } else {
                eval_query(r, j, model, settings)
            };
            res.with_context(|| format!("query `{}`", r.query_id()))
        })
        .collect::<Result<_>>()?;
    let mut skipped = inputs.skipped;
    let mut eval = Vec::new();
    let mut auc = Vec::new();
    let mut statics = Vec::new();
    let mut evaluated = 0;
    for ((r, _), outcome) in inputs.pairs.iter().zip(outcomes) {
        match outcome {
            Ok(o) => {
                evaluated += 1;
                eval.extend(o.eval);
                auc.extend(o.auc);
                statics.extend(o.statics);
            }
            Err(reason) => {
                debug!("query `{}` skipped: {reason}", r.query_id());
                skipped.push(Skipped::new(r.query_id(), reason));
            }
        }
    }
    skipped.sort();
    create_out_dir(&settings.out)?;
    let mut files = Vec::new();
    let averaged = macro_average_eval(&eval);
    eval.extend(averaged);
    let name = if sweeping { "curves.csv" } else { "eval.csv" };
    files.push(write_file(&settings.out, name, |w| {
        write_eval_rows(w, &eval)
    })?);
    if sweeping {
        let averaged = macro_average_auc(&auc);
        auc.extend(averaged);
        files.push(write_file(&settings.out, "auc.csv", |w| {
            write_auc_rows(w, &auc)
        })?);
    }
    if settings.static_metrics {
        files.push(write_file(&settings.out, "static.csv", |w| {
            write_static_rows(w, &statics)
        })?);
    }
    Ok(Report {
        evaluated,
        skipped,
        files,
    })
}
