//! `synth`: seeded synthetic runs, judgments, features and groups.

use std::path::PathBuf;

use anyhow::{bail, Result};

use expexp_core::io::groups::dataset_group_rows;
use expexp_core::io::{write_features, write_groups, write_qrels, write_run};
use expexp_core::synth::{synth_ltr, synth_runs, GradeSpec, LtrSynthConfig, RunSynthConfig};

use crate::args::SynthArgs;
use crate::config::{ConfigFile, DEFAULT_OUT};
use crate::{create_out_dir, write_file};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSettings {
    pub runs: RunSynthConfig,
    /// `None` when no learning-to-rank data is requested.
    pub ltr: Option<LtrSynthConfig>,
    pub out: PathBuf,
}

impl SynthSettings {
    pub fn resolve(args: &SynthArgs, file: &ConfigFile) -> Result<Self> {
        let seed = file.get(args.common.seed, "seed", 0)?;
        let counts: Option<Vec<usize>> = file.list(args.grades.clone(), "grades")?;
        let dist: Option<Vec<f64>> = file.list(args.grade_dist.clone(), "grade-dist")?;
        let grades = match (counts, dist) {
            (Some(_), Some(_)) => bail!("give either --grades or --grade-dist, not both"),
            (Some(c), None) => GradeSpec::Counts(c),
            (None, Some(d)) => GradeSpec::Distribution(d),
            (None, None) => RunSynthConfig::default().grades,
        };
        let d = RunSynthConfig::default();
        let runs = RunSynthConfig {
            n_queries: file.get(args.n_queries, "n-queries", d.n_queries)?,
            pool_size: file.get(args.pool_size, "pool-size", d.pool_size)?,
            grades,
            noise: file.get(args.noise, "noise", d.noise)?,
            seed,
            tag: file.get(args.tag.clone(), "tag", d.tag)?,
        };
        let l = LtrSynthConfig::default();
        let ltr_queries = file.get(args.ltr_queries, "ltr-queries", l.n_queries)?;
        let ltr = (ltr_queries > 0)
            .then(|| -> Result<LtrSynthConfig> {
                Ok(LtrSynthConfig {
                    n_queries: ltr_queries,
                    docs_per_query: file.get(args.ltr_docs, "ltr-docs", l.docs_per_query)?,
                    n_features: file.get(args.ltr_features, "ltr-features", l.n_features)?,
                    noise: file.get(args.ltr_noise, "ltr-noise", l.noise)?,
                    seed,
                })
            })
            .transpose()?;
        Ok(SynthSettings {
            runs,
            ltr,
            out: file
                .path(args.common.out.clone(), "out")
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        })
    }
}

pub fn run(settings: &SynthSettings) -> Result<Vec<PathBuf>> {
    let pairs = synth_runs(&settings.runs)?;
    let ltr = settings.ltr.as_ref().map(synth_ltr).transpose()?;
    create_out_dir(&settings.out)?;
    let mut files = vec![
        write_file(&settings.out, "run.txt", |w| {
            write_run(w, pairs.iter().map(|(_, r)| r))
        })?,
        write_file(&settings.out, "qrels.txt", |w| {
            write_qrels(w, pairs.iter().map(|(j, _)| j))
        })?,
    ];
    if let Some(d) = &ltr {
        files.push(write_file(&settings.out, "features.txt", |w| {
            write_features(w, d)
        })?);
        let rows = dataset_group_rows(d);
        files.push(write_file(&settings.out, "groups.txt", |w| {
            write_groups(w, &rows)
        })?);
    }
    Ok(files)
}
