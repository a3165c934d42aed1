//! Acceptance suite: criteria 1-11, run in sequence so that each runtime
//! limit is measured without competing tests. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.
//!
//! `cargo test -p expexp-cli --test acceptance`; set `ACCEPTANCE=3,7` to run
//! a subset.

#[path = "../../core/tests/common/mod.rs"]
mod core_oracle;
#[path = "../../ltr/tests/common/mod.rs"]
mod ltr_oracle;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use rand::Rng;
use statrs::statistics::Statistics;

use expexp_cli::train::{make_splits, run_experiment, Experiment};
use expexp_core::metrics::{expected_static_metrics, CurveNormalizer};
use expexp_core::policies::{sweep, PolicyFamily, SweepConfig};
use expexp_core::rng::{stream, stream_seed};
use expexp_core::synth::{synth_ltr, synth_runs, GradeSpec, LtrSynthConfig, RunSynthConfig};
use expexp_core::{
    ee_auc, ee_breakdown, exact_expected_exposure, expected_exposure_mc, ranking_exposure,
    target_exposure, BrowsingModel, ExposureVector, ModelKind, Policy, RelevanceJudgments,
    ScoredRun, StopMap,
};
use expexp_ltr::evaluate::default_temperatures;
use expexp_ltr::objective::Objective;
use expexp_ltr::surrogate::{gumbel_noise, sample_backward, sample_forward, ExposureMode};
use expexp_ltr::train::{query_loss, LossSettings, QueryProblem};
use expexp_ltr::{OptimizerKind, Scorer, TrainConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

type Criterion = fn() -> Result<Outcome>;

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let criteria: [(&str, u64, Criterion); 11] = [
        ("oracle equivalence", 10, c1_oracle_equivalence),
        ("closed-form spot values", 10, c2_spot_values),
        ("decomposition identity", 5, c3_decomposition),
        ("Monte Carlo convergence", 60, c4_monte_carlo),
        ("PL dominates RT", 300, c5_pl_dominates_rt),
        ("static metric correlation", 120, c6_correlation),
        ("endpoint behavior", 60, c7_endpoints),
        ("gradient correctness", 60, c8_gradients),
        ("directional LTR comparison", 1200, c9_ltr),
        (
            "EE-AUC separates policies, RBP does not",
            300,
            c10_mechanism,
        ),
        ("byte-identical CSV", 300, c11_reproducible),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let k = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&k)) {
            continue;
        }
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (pass, detail) = match result {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {k:>2} {} {name}: {detail} [{:.1}s / {limit}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn oracle_params(model: &BrowsingModel) -> core_oracle::Params {
    core_oracle::Params {
        gamma: model.gamma(),
        depth: model.depth(),
        phi: (model.kind() == ModelKind::Err).then(|| model.stop_map().table().to_vec()),
    }
}

fn c1_oracle_equivalence() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=8 {
        for sorted in core_oracle::grade_multisets(n, 3) {
            let mut grades = sorted;
            grades.rotate_left(n / 2);
            let j = RelevanceJudgments::from_grades("q", &grades);
            let perms = core_oracle::grade_sorted_permutations(&grades);
            let stop = StopMap::exponential((*grades.iter().max().unwrap()).max(1));
            for gamma in [0.3, 0.5, 0.8] {
                for depth in [None, Some(3)] {
                    for kind in [ModelKind::Rbp, ModelKind::Err] {
                        let model = BrowsingModel::new(kind, gamma, depth, stop.clone())?;
                        let want =
                            core_oracle::mean_exposure(&perms, &grades, &oracle_params(&model));
                        let got = target_exposure(&model, &j)?;
                        worst = worst.max(core_oracle::max_abs_diff(got.values(), &want));
                        cases += 1;
                    }
                }
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{cases} cases, max error {worst:.1e}"),
    )
}

fn c2_spot_values() -> Result<Outcome> {
    let rbp = BrowsingModel::rbp(0.5)?;
    let err = BrowsingModel::err(0.5, StopMap::new(vec![0.0, 0.5])?)?;
    let cases: [(&BrowsingModel, &[u32], &[f64]); 3] = [
        (&rbp, &[1, 1], &[0.75, 0.75]),
        (&rbp, &[2, 1, 1], &[1.0, 0.375, 0.375]),
        (&err, &[1, 1], &[0.625, 0.625]),
    ];
    let mut pass = true;
    let mut seen = Vec::new();
    for (model, grades, want) in cases {
        let j = RelevanceJudgments::from_grades("q", grades);
        let got = target_exposure(model, &j)?;
        let enumerated = core_oracle::oracle_by_enumeration(grades, &oracle_params(model));
        pass &= got.values() == want && enumerated == want;
        seen.push(format!("{:?}", got.values()));
    }
    outcome(pass, seen.join(" "))
}

fn c3_decomposition() -> Result<Outcome> {
    let mut rng = stream(0, "decomposition", 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=100);
        let scale = 10f64.powf(rng.random_range(-3.0..1.0));
        let e: Vec<f64> = (0..n).map(|_| scale * rng.random::<f64>()).collect();
        let t: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let b = ee_breakdown(&ExposureVector::new(e)?, &ExposureVector::new(t.clone())?)?;
        let t2: f64 = t.iter().map(|x| x * x).sum();
        worst = worst.max((b.ee_l - (b.ee_d - b.ee_r + t2)).abs());
    }
    outcome(
        worst <= 1e-9,
        format!("10000 pairs, max residual {worst:.1e}"),
    )
}

fn c4_monte_carlo() -> Result<Outcome> {
    let model = BrowsingModel::rbp(0.5)?;
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let mut rng = stream(seed, "mc-pool", 0);
        let entries: Vec<(String, f64)> = (0..5)
            .map(|i| (format!("d{i}"), rng.random_range(0.05..3.0)))
            .collect();
        let grades: Vec<(String, u32)> = (0..5)
            .map(|i| (format!("d{i}"), rng.random_range(0..3)))
            .collect();
        let alpha = rng.random_range(0.0..4.0);
        let run = ScoredRun::new("q", "t", entries)?;
        let j = RelevanceJudgments::new("q", grades)?;
        let policy = Policy::plackett_luce(&run, &j, alpha, 100)?;
        let exact = exact_expected_exposure(&policy, &model, &j)?;
        let mc = expected_exposure_mc(&policy, &model, &j, 100_000, seed)?;
        let d = core_oracle::max_abs_diff(mc.values(), exact.values());
        worst = worst.max(d);
        ok += usize::from(d < 0.01);
    }
    outcome(
        ok >= 99,
        format!("{ok}/100 seeds within 0.01, max deviation {worst:.4}"),
    )
}

fn protocol_model() -> Result<BrowsingModel> {
    Ok(BrowsingModel::rbp(0.5)?.with_depth(Some(20))?)
}

fn family_auc(
    run: &ScoredRun,
    j: &RelevanceJudgments,
    model: &BrowsingModel,
    family: PolicyFamily,
    seed: u64,
) -> Result<f64> {
    let config = SweepConfig {
        family,
        grid: family.default_grid(),
        n_samples: 50,
        rerank_depth: 100,
        seed,
    };
    Ok(ee_auc(&sweep(run, j, model, &config)?.curve)?)
}

fn c5_pl_dominates_rt() -> Result<Outcome> {
    let model = protocol_model()?;
    let pairs = synth_runs(&RunSynthConfig {
        n_queries: 100,
        ..Default::default()
    })?;
    let mut wins = 0;
    for (j, run) in &pairs {
        let pl = family_auc(run, j, &model, PolicyFamily::PlackettLuce, 0)?;
        let rt = family_auc(run, j, &model, PolicyFamily::RankTransposition, 0)?;
        wins += usize::from(pl > rt);
    }
    outcome(wins >= 90, format!("PL above RT on {wins}/100 queries"))
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    x.covariance(y) / (x.std_dev() * y.std_dev())
}

fn c6_correlation() -> Result<Outcome> {
    let pairs = synth_runs(&RunSynthConfig {
        n_queries: 20,
        grades: GradeSpec::Distribution(vec![0.85, 0.1, 0.05]),
        noise: 1.0,
        seed: 6,
        ..Default::default()
    })?;
    let alphas: Vec<f64> = (0..=24).map(|i| i as f64 / 2.0).collect();
    let rbp = protocol_model()?;
    let err = BrowsingModel::new(ModelKind::Err, 0.5, Some(20), StopMap::exponential(2))?;
    let mut r = Vec::new();
    for model in [&rbp, &err] {
        let mut statics = Vec::new();
        let mut ee_r = Vec::new();
        for (i, &alpha) in alphas.iter().enumerate() {
            let mut s_sum = 0.0;
            let mut r_sum = 0.0;
            let mut n = 0.0;
            for (j, run) in &pairs {
                let j = run.pooled(j.clone());
                if j.grades().iter().all(|&g| g == 0) {
                    continue;
                }
                let policy = Policy::plackett_luce(run, &j, alpha, 100)?;
                let seed = stream_seed(6, run.query_id(), i as u64);
                let st = expected_static_metrics(&policy, model, &j, 50, seed)?;
                let eps = expected_exposure_mc(&policy, model, &j, 50, seed)?;
                let b = ee_breakdown(&eps, &target_exposure(model, &j)?)?;
                s_sum += if model.kind() == ModelKind::Rbp {
                    st.rbp
                } else {
                    st.err
                };
                r_sum += b.ee_r;
                n += 1.0;
            }
            statics.push(s_sum / n);
            ee_r.push(r_sum / n);
        }
        r.push(pearson(&statics, &ee_r));
    }
    outcome(
        r[0] >= 0.95 && r[1] >= 0.999,
        format!(
            "r(RBP, ee_r) = {:.5}, r(ERR, ee_r) = {:.6} over {} α values",
            r[0],
            r[1],
            alphas.len()
        ),
    )
}

const LARGE_ALPHA: f64 = 1e6;

fn c7_endpoints() -> Result<Outcome> {
    let model = protocol_model()?;
    let pairs = synth_runs(&RunSynthConfig {
        n_queries: 20,
        noise: 0.5,
        seed: 7,
        ..Default::default()
    })?;
    let mut max_uniform: f64 = 0.0;
    let mut min_rt: f64 = 1.0;
    let mut max_z: f64 = 0.0;
    for (i, (j, run)) in pairs.iter().enumerate() {
        let j = run.pooled(j.clone());
        let target = target_exposure(&model, &j)?;
        let norm = CurveNormalizer::new(&model, &j)?;
        let seed = i as u64;

        // 50 samples bias ‖ε‖² upward by about 0.02 in normalized units on a
        // 100-document pool; the endpoint is checked with more samples
        let uniform = Policy::plackett_luce(run, &j, 0.0, 100)?;
        let eps = expected_exposure_mc(&uniform, &model, &j, 2000, seed)?;
        max_uniform = max_uniform.max(norm.normalize(&ee_breakdown(&eps, &target)?)?.0);

        let rt = Policy::rank_transposition(run, &j, 1.0, 100)?;
        let eps = expected_exposure_mc(&rt, &model, &j, 50, seed)?;
        min_rt = min_rt.min(norm.normalize(&ee_breakdown(&eps, &target)?)?.0);

        let det = Policy::static_run(run, &j)?;
        let det = ee_breakdown(&expected_exposure_mc(&det, &model, &j, 1, 0)?, &target)?.ee_r;
        // noisy scores include pairs within 1e-4 of each other, which only
        // an α of this size separates
        let pl = Policy::plackett_luce(run, &j, LARGE_ALPHA, 100)?;
        let mut rng = stream(seed, "endpoint", 0);
        let samples: Vec<f64> = (0..50)
            .map(|_| -> Result<f64> {
                let e = ranking_exposure(&model, &pl.sample(&mut rng), &j)?;
                Ok(2.0 * e.dot(&target)?)
            })
            .collect::<Result<_>>()?;
        let mean = samples.as_slice().mean();
        let se = samples.as_slice().std_dev() / 50f64.sqrt();
        let z = if se > 0.0 {
            (mean - det).abs() / se
        } else if mean == det {
            0.0
        } else {
            f64::INFINITY
        };
        max_z = max_z.max(z);
    }
    outcome(
        max_uniform <= 0.02 && min_rt == 1.0 && max_z <= 3.0,
        format!(
            "PL α=0 max d_norm {max_uniform:.4}, RT β=1 min d_norm {min_rt}, PL α={LARGE_ALPHA:e} ee_r within {max_z:.2} SE of static"
        ),
    )
}

fn gradient_instance(k: u64) -> (ltr_oracle::Instance, Vec<f64>) {
    let mut rng = stream(11, "acceptance-grad", k);
    let n_docs = rng.random_range(2..=10);
    let n_features = rng.random_range(1..=8);
    let hidden: Vec<usize> = match k % 3 {
        0 => vec![],
        1 => vec![rng.random_range(2..=6)],
        _ => vec![rng.random_range(2..=5), rng.random_range(2..=5)],
    };
    let mut sizes = vec![n_features];
    sizes.extend(&hidden);
    sizes.push(1);
    let scorer = Scorer::new(n_features, &hidden, 0.0, &mut rng).unwrap();
    let params = scorer
        .params()
        .iter()
        .map(|p| p + rng.random_range(-0.1..0.1))
        .collect();
    let inst = ltr_oracle::Instance {
        sizes,
        n_docs,
        features: (0..n_docs * n_features)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect(),
        grades: (0..n_docs).map(|_| rng.random_range(0..3)).collect(),
        noise: (0..rng.random_range(1..=4))
            .map(|_| gumbel_noise(n_docs, &mut rng))
            .collect(),
        target: (0..n_docs).map(|_| rng.random_range(0.0..1.0)).collect(),
        groups: None,
        gamma: [0.3, 0.5, 0.8][(k % 3) as usize],
        depth: k.is_multiple_of(4).then_some(n_docs / 2 + 1),
        phi: (k % 5 < 2).then(|| vec![0.0, 0.5, 0.75]),
        tau: if k.is_multiple_of(2) { 0.1 } else { 0.5 },
        lambda: rng.random_range(0.0..1.0),
    };
    (inst, params)
}

fn c8_gradients() -> Result<Outcome> {
    let mut worst_st: f64 = 0.0;
    let mut worst_full: f64 = 0.0;
    for k in 0..50 {
        let (inst, params) = gradient_instance(k);
        let model = match &inst.phi {
            None => BrowsingModel::rbp(inst.gamma)?,
            Some(t) => BrowsingModel::err(inst.gamma, StopMap::new(t.clone())?)?,
        }
        .with_depth(inst.depth)?;
        let s = Scorer::from_parts(inst.sizes.clone(), params.clone(), 0.0)?;
        let (scores, cache) = s.forward_eval(&inst.features, inst.n_docs);

        // straight-through backward pass against the smooth-rank surrogate
        let mut rng = stream(11, "acceptance-weights", k);
        let w: Vec<f64> = (0..inst.n_docs)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let per_sample: Vec<f64> = w.iter().map(|x| x / inst.noise.len() as f64).collect();
        let mut g = vec![0.0; inst.n_docs];
        for noise in &inst.noise {
            let t = sample_forward(
                &scores,
                noise,
                &inst.grades,
                &model,
                inst.tau,
                ExposureMode::StraightThrough,
            );
            for (a, b) in g.iter_mut().zip(sample_backward(&t, inst.tau, &per_sample)) {
                *a += b;
            }
        }
        let numeric = ltr_oracle::central_difference(
            |x| {
                let sc = ltr_oracle::mlp(&inst.sizes, x, &inst.features, inst.n_docs);
                ltr_oracle::smooth_exposure(&inst, &sc)
                    .iter()
                    .zip(&w)
                    .map(|(e, w)| e * w)
                    .sum()
            },
            &params,
            1e-6,
        );
        worst_st = worst_st.max(ltr_oracle::relative_error(
            &s.backward(&cache, &g),
            &numeric,
        ));

        // the full expected-exposure objective through the same surrogate
        let problem = QueryProblem {
            query_id: "q".into(),
            n_docs: inst.n_docs,
            features: inst.features.clone(),
            grades: inst.grades.clone(),
            target: inst.target.clone(),
            groups: None,
        };
        let settings = LossSettings {
            objective: Objective::ExpectedExposure,
            lambda: inst.lambda,
            tau: inst.tau,
            model: &model,
            mode: ExposureMode::Smooth,
        };
        let (_, g_scores) = query_loss(&scores, &inst.noise, &problem, &settings)?;
        let numeric = ltr_oracle::central_difference(|x| ltr_oracle::loss(&inst, x), &params, 1e-6);
        worst_full = worst_full.max(ltr_oracle::relative_error(
            &s.backward(&cache, &g_scores),
            &numeric,
        ));
    }
    outcome(
        worst_st < 1e-4 && worst_full < 1e-4,
        format!("50 instances, max relative error {worst_st:.1e} (surrogate), {worst_full:.1e} (objective)"),
    )
}

fn c9_ltr() -> Result<Outcome> {
    let model = protocol_model()?;
    let mut ee_wins = 0;
    let mut group_wins = 0;
    let (mut pw_sum, mut ee_sum, mut ee_dp_sum, mut group_dp_sum) = (0.0, 0.0, 0.0, 0.0);
    let mut lines = Vec::new();
    for seed in 0..5u64 {
        let data = synth_ltr(&LtrSynthConfig {
            n_queries: 250,
            seed,
            ..Default::default()
        })?;
        // 160 train + 40 validation = the 200 training queries; 50 test
        let splits = make_splits(&data, (0.64, 0.16), seed);
        ensure!(
            splits.test.len() == 50,
            "test split has {} queries",
            splits.test.len()
        );
        let exp = Experiment {
            objectives: vec![
                Objective::Pointwise,
                Objective::ExpectedExposure,
                Objective::GroupParity,
            ],
            lambdas: (0..=10).map(|i| i as f64 / 10.0).collect(),
            temperatures: default_temperatures(),
            base: TrainConfig {
                hidden: vec![],
                optimizer: OptimizerKind::adam(),
                learning_rate: 0.01,
                epochs: 20,
                patience: 5,
                dropout: 0.0,
                n_test_samples: 50,
                seed,
                ..Default::default()
            },
            seed,
        };
        let results = run_experiment(&splits, &model, &exp)?;
        let auc = |o: Objective| results.iter().find(|r| r.objective == o).unwrap();
        let pw = auc(Objective::Pointwise).individual.mean_auc;
        let ee = auc(Objective::ExpectedExposure);
        let ee_dp = ee.parity.as_ref().unwrap().mean_auc;
        let group_dp = auc(Objective::GroupParity)
            .parity
            .as_ref()
            .unwrap()
            .mean_auc;
        let ee = ee.individual.mean_auc;
        ee_wins += usize::from(ee >= pw);
        group_wins += usize::from(group_dp >= ee_dp);
        pw_sum += pw;
        ee_sum += ee;
        ee_dp_sum += ee_dp;
        group_dp_sum += group_dp;
        lines.push(format!(
            "seed {seed}: ee {ee:.4} pw {pw:.4} | dp group {group_dp:.4} ee {ee_dp:.4}"
        ));
    }
    for l in &lines {
        println!("    {l}");
    }
    outcome(
        ee_wins >= 4 && group_wins >= 4 && ee_sum >= pw_sum && group_dp_sum >= ee_dp_sum,
        format!(
            "EE-AUC ee {:.4} vs pointwise {:.4} ({ee_wins}/5); parity group {:.4} vs ee {:.4} ({group_wins}/5)",
            ee_sum / 5.0,
            pw_sum / 5.0,
            group_dp_sum / 5.0,
            ee_dp_sum / 5.0
        ),
    )
}

/// Mean of paired differences and its standard error.
fn paired_gap(d: &[f64]) -> (f64, f64) {
    (d.mean(), d.std_dev() / (d.len() as f64).sqrt())
}

fn c10_mechanism() -> Result<Outcome> {
    let model = protocol_model()?;
    let mut rng = stream(10, "runs", 0);
    let mut runs = Vec::new();
    for r in 0..100u64 {
        let pairs = synth_runs(&RunSynthConfig {
            n_queries: 10,
            noise: rng.random_range(0.3..2.0),
            seed: 1000 + r,
            ..Default::default()
        })?;
        let mut rbp = 0.0;
        for (j, run) in &pairs {
            let pooled = run.pooled(j.clone());
            let det = Policy::static_run(run, &pooled)?;
            rbp += expected_static_metrics(&det, &model, &pooled, 1, 0)?.rbp;
        }
        runs.push((rbp / pairs.len() as f64, r, pairs));
    }
    // neighbours in the static RBP order go to opposite treatments
    runs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut rbp_diff, mut auc_diff) = (Vec::new(), Vec::new());
    for pair in runs.chunks(2) {
        let (pl, rt) = if rng.random::<bool>() {
            (&pair[0], &pair[1])
        } else {
            (&pair[1], &pair[0])
        };
        let mut auc = [0.0; 2];
        for (k, (family, (_, r, pairs))) in [
            (PolicyFamily::PlackettLuce, pl),
            (PolicyFamily::RankTransposition, rt),
        ]
        .into_iter()
        .enumerate()
        {
            for (j, run) in pairs {
                auc[k] += family_auc(run, j, &model, family, *r)? / pairs.len() as f64;
            }
        }
        rbp_diff.push(pl.0 - rt.0);
        auc_diff.push(auc[0] - auc[1]);
    }
    let (rbp_gap, rbp_se) = paired_gap(&rbp_diff);
    let (auc_gap, auc_se) = paired_gap(&auc_diff);
    outcome(
        rbp_gap.abs() < 3.0 * rbp_se && auc_gap > 3.0 * auc_se,
        format!(
            "{} matched pairs: static RBP gap PL-RT {rbp_gap:.4} (SE {rbp_se:.4}); EE-AUC gap {auc_gap:.4} (SE {auc_se:.4})",
            rbp_diff.len()
        ),
    )
}

fn expexp(dir: &Path, args: &[&str]) -> Result<()> {
    let out = Command::new(env!("CARGO_BIN_EXE_expexp"))
        .args(args)
        .current_dir(dir)
        .output()?;
    ensure!(
        out.status.success(),
        "expexp {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

fn c11_reproducible() -> Result<Outcome> {
    let dirs = [tempfile::TempDir::new()?, tempfile::TempDir::new()?];
    for d in &dirs {
        let d = d.path();
        expexp(
            d,
            &[
                "synth",
                "--out",
                "data",
                "--seed",
                "5",
                "--noise",
                "0.7",
                "--grade-dist",
                "0.8,0.15,0.05",
                "--ltr-queries",
                "30",
            ],
        )?;
        expexp(
            d,
            &[
                "eval",
                "--run",
                "data/run.txt",
                "--qrels",
                "data/qrels.txt",
                "--policy",
                "pl",
                "--seed",
                "5",
                "--out",
                "eval",
            ],
        )?;
        expexp(
            d,
            &[
                "sweep",
                "--run",
                "data/run.txt",
                "--qrels",
                "data/qrels.txt",
                "--policy",
                "pl,rt",
                "--model",
                "err",
                "--static-metrics",
                "--seed",
                "5",
                "--out",
                "sweep",
            ],
        )?;
        expexp(
            d,
            &[
                "train",
                "--features",
                "data/features.txt",
                "--groups",
                "data/groups.txt",
                "--objective",
                "pointwise,pairwise,ee,group",
                "--lambda",
                "0,0.5,1",
                "--hidden",
                "8",
                "--epochs",
                "3",
                "--seed",
                "5",
                "--out",
                "train",
            ],
        )?;
    }
    let (a, b) = (dirs[0].path(), dirs[1].path());
    let mut files = Vec::new();
    collect(a, &mut files)?;
    let mut differ = Vec::new();
    for f in &files {
        let rel = f.strip_prefix(a)?;
        if std::fs::read(f)? != std::fs::read(b.join(rel))? {
            differ.push(rel.display().to_string());
        }
    }
    let csv = files
        .iter()
        .filter(|f| f.extension().is_some_and(|e| e == "csv"))
        .count();
    outcome(
        differ.is_empty() && csv >= 8,
        format!(
            "{} files ({csv} CSV) compared, {} differ {differ:?}",
            files.len(),
            differ.len()
        ),
    )
}

fn collect(dir: &Path, out: &mut Vec<std::path::PathBuf>) -> Result<()> {
    for e in std::fs::read_dir(dir)? {
        let p = e?.path();
        if p.is_dir() {
            collect(&p, out)?;
        } else {
            out.push(p);
        }
    }
    Ok(())
}
