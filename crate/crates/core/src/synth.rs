//! Seeded synthetic collections: scored runs with known grades, and
//! learning-to-rank data with linear ground-truth relevance.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{LtrDataset, LtrQuery};
use crate::error::{Error, Result};
use crate::io::groups::{discretize, PAGERANK_THRESHOLDS};
use crate::judgments::RelevanceJudgments;
use crate::policies::ScoredRun;
use crate::rng::stream;

/// How grades are assigned within each synthetic query.
#[derive(Debug, Clone, PartialEq)]
pub enum GradeSpec {
    /// Exactly `counts[g]` documents at grade `g > 0`; the rest get 0.
    Counts(Vec<usize>),
    /// Each document draws its grade from this distribution over `0..len`.
    Distribution(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSynthConfig {
    pub n_queries: usize,
    pub pool_size: usize,
    pub grades: GradeSpec,
    /// Standard deviation of the Gaussian noise added to `score = grade`.
    pub noise: f64,
    pub seed: u64,
    pub tag: String,
}

impl Default for RunSynthConfig {
    fn default() -> Self {
        RunSynthConfig {
            n_queries: 10,
            pool_size: 100,
            grades: GradeSpec::Counts(vec![0, 10]),
            noise: 0.0,
            seed: 0,
            tag: "synth".into(),
        }
    }
}

pub fn query_id(i: usize) -> String {
    format!("q{:04}", i + 1)
}

fn validate_distribution(p: &[f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    if p.is_empty() || p.iter().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Configuration(
            "grade distribution must be nonnegative and sum to 1".into(),
        ));
    }
    Ok(())
}

/// Judgments and a scored run per query; `score = grade + N(0, noise²)`.
pub fn synth_runs(config: &RunSynthConfig) -> Result<Vec<(RelevanceJudgments, ScoredRun)>> {
    if config.pool_size == 0 {
        return Err(Error::Configuration("pool size must be positive".into()));
    }
    if !(config.noise >= 0.0 && config.noise.is_finite()) {
        return Err(Error::Configuration("noise must be finite and ≥ 0".into()));
    }
    match &config.grades {
        GradeSpec::Counts(c) if c.iter().skip(1).sum::<usize>() > config.pool_size => {
            return Err(Error::Configuration(
                "more graded documents than the pool holds".into(),
            ))
        }
        GradeSpec::Distribution(p) => validate_distribution(p)?,
        _ => {}
    }
    let normal = Normal::new(0.0, config.noise).expect("noise validated");
    (0..config.n_queries)
        .map(|qi| {
            let qid = query_id(qi);
            let mut rng = stream(config.seed, &qid, 0);
            let grades: Vec<u32> = match &config.grades {
                GradeSpec::Counts(counts) => {
                    let mut g = vec![0u32; config.pool_size];
                    let mut at = 0;
                    for (grade, &c) in counts.iter().enumerate().skip(1) {
                        g[at..at + c].iter_mut().for_each(|x| *x = grade as u32);
                        at += c;
                    }
                    g.shuffle(&mut rng);
                    g
                }
                GradeSpec::Distribution(p) => (0..config.pool_size)
                    .map(|_| {
                        let u: f64 = rng.random();
                        let mut acc = 0.0;
                        for (g, &pg) in p.iter().enumerate() {
                            acc += pg;
                            if u < acc {
                                return g as u32;
                            }
                        }
                        (p.len() - 1) as u32
                    })
                    .collect(),
            };
            let docs: Vec<String> = (0..config.pool_size)
                .map(|i| format!("{qid}-d{i:04}"))
                .collect();
            let entries = docs
                .iter()
                .zip(&grades)
                .map(|(d, &g)| {
                    let noise = if config.noise > 0.0 {
                        normal.sample(&mut rng)
                    } else {
                        0.0
                    };
                    (d.clone(), g as f64 + noise)
                })
                .collect::<Vec<_>>();
            // ScoredRun keeps supplied order for ties; sort ties by id to
            // match what the run parser produces.
            let mut entries = entries;
            entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let run = ScoredRun::new(qid.clone(), config.tag.clone(), entries)?;
            let judgments = RelevanceJudgments::new(qid, docs.into_iter().zip(grades))?;
            Ok((judgments, run))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LtrSynthConfig {
    pub n_queries: usize,
    pub docs_per_query: usize,
    /// At least 2: feature 0 is the log-PageRank-like group attribute.
    pub n_features: usize,
    /// Standard deviation of latent-relevance noise.
    pub noise: f64,
    pub seed: u64,
}

impl Default for LtrSynthConfig {
    fn default() -> Self {
        LtrSynthConfig {
            n_queries: 250,
            docs_per_query: 20,
            n_features: 10,
            noise: 0.1,
            seed: 0,
        }
    }
}

/// Grade quotas per query, best grade first, as fractions of the pool.
const GRADE_QUOTAS: [(u32, f64); 4] = [(4, 0.05), (3, 0.10), (2, 0.15), (1, 0.25)];

/// Learning-to-rank queries whose latent relevance is linear in the features.
///
/// Feature 0 is `log10(pagerank)` with `pagerank ∈ [10², 10⁵]` log-uniform;
/// documents are grouped by [`PAGERANK_THRESHOLDS`], giving three groups of
/// roughly equal size. The remaining features are uniform on `[0, 1]`. Latent
/// relevance is `w·x + N(0, noise²)` with a fixed positive weight on the
/// PageRank feature, so group membership correlates with relevance. Grades
/// 4..1 go to the top 5/10/15/25% of each query by latent relevance.
pub fn synth_ltr(config: &LtrSynthConfig) -> Result<LtrDataset> {
    if config.n_features < 2 {
        return Err(Error::Configuration("need at least 2 features".into()));
    }
    if config.docs_per_query == 0 {
        return Err(Error::Configuration(
            "docs per query must be positive".into(),
        ));
    }
    if !(config.noise >= 0.0 && config.noise.is_finite()) {
        return Err(Error::Configuration("noise must be finite and ≥ 0".into()));
    }
    let f = config.n_features;
    let mut wrng = stream(config.seed, "weights", 0);
    let std_normal = Normal::new(0.0, 1.0).expect("valid");
    let mut weights: Vec<f64> = (0..f).map(|_| std_normal.sample(&mut wrng)).collect();
    weights[0] = 1.5;
    let noise = Normal::new(0.0, config.noise).expect("noise validated");
    let n = config.docs_per_query;
    let queries = (0..config.n_queries)
        .map(|qi| {
            let qid = query_id(qi);
            let mut rng = stream(config.seed, &qid, 1);
            let mut features = Vec::with_capacity(n * f);
            let mut groups = Vec::with_capacity(n);
            let mut latent = Vec::with_capacity(n);
            for _ in 0..n {
                let log_pr: f64 = rng.random_range(2.0..5.0);
                groups.push(discretize(10f64.powf(log_pr), &PAGERANK_THRESHOLDS));
                let mut row = vec![log_pr];
                row.extend((1..f).map(|_| rng.random::<f64>()));
                let scaled_pr = (log_pr - 2.0) / 3.0;
                let mut z = weights[0] * scaled_pr;
                z += row[1..]
                    .iter()
                    .zip(&weights[1..])
                    .map(|(x, w)| x * w)
                    .sum::<f64>();
                if config.noise > 0.0 {
                    z += noise.sample(&mut rng);
                }
                latent.push(z);
                features.extend(row);
            }
            let mut by_latent: Vec<usize> = (0..n).collect();
            by_latent.sort_by(|&a, &b| latent[b].total_cmp(&latent[a]));
            let mut grades = vec![0u32; n];
            let mut at = 0usize;
            for (grade, frac) in GRADE_QUOTAS {
                let take = ((n as f64 * frac).round() as usize).max(1).min(n - at);
                for &d in &by_latent[at..at + take] {
                    grades[d] = grade;
                }
                at += take;
            }
            LtrQuery {
                doc_ids: (0..n).map(|i| format!("{qid}-d{i:03}")).collect(),
                query_id: qid,
                features,
                grades,
                groups: Some(groups),
            }
        })
        .collect();
    Ok(LtrDataset::new(f, queries)?.with_group_names(vec![
        "pr<1000".into(),
        "pr1000-10000".into(),
        "pr>=10000".into(),
    ]))
}
