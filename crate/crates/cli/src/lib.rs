//! The `expexp` command line: evaluation, sweeps, synthetic data and
//! training. Each subcommand resolves its settings (flag, then config file,
//! then default), runs, and writes CSV files into the output directory.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod config;
pub mod eval;
pub mod synth;
pub mod train;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::CommandFactory;

use args::{Cli, Command};
use config::ConfigFile;

/// A query left out of the results and why.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Skipped {
    pub query: String,
    pub reason: String,
}

impl Skipped {
    pub fn new(query: impl Into<String>, reason: impl Into<String>) -> Self {
        Skipped {
            query: query.into(),
            reason: reason.into(),
        }
    }
}

pub fn create_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Writes `dir/name` through a buffered writer and returns its path.
pub fn write_file<F, E>(dir: &Path, name: &str, f: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> std::result::Result<(), E>,
    E: std::error::Error + Send + Sync + 'static,
{
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Long flag names of a subcommand, which double as config-file keys.
pub fn config_keys(subcommand: &str) -> Vec<String> {
    let cmd = Cli::command();
    cmd.find_subcommand(subcommand)
        .map(|c| {
            c.get_arguments()
                .filter_map(|a| a.get_long())
                .filter(|l| *l != "config" && *l != "help")
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default()
}

fn load_config(path: Option<&Path>, subcommand: &str) -> Result<ConfigFile> {
    ConfigFile::load(path, &config_keys(subcommand))
}

fn report_files(files: &[PathBuf]) {
    for f in files {
        eprintln!("wrote {}", f.display());
    }
}

fn report_skipped(evaluated: usize, skipped: &[Skipped]) {
    eprintln!("evaluated {evaluated} queries, skipped {}", skipped.len());
    for s in skipped {
        eprintln!("  skipped {}: {}", s.query, s.reason);
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval(a) => {
            let file = load_config(a.common.config.as_deref(), "eval")?;
            let s = eval::EvalSettings::resolve(&a, &file, false)?;
            let r = eval::run(&s, false)?;
            report_skipped(r.evaluated, &r.skipped);
            report_files(&r.files);
        }
        Command::Sweep(a) => {
            let file = load_config(a.common.config.as_deref(), "sweep")?;
            let s = eval::EvalSettings::resolve(&a, &file, true)?;
            let r = eval::run(&s, true)?;
            report_skipped(r.evaluated, &r.skipped);
            report_files(&r.files);
        }
        Command::Synth(a) => {
            let file = load_config(a.common.config.as_deref(), "synth")?;
            let s = synth::SynthSettings::resolve(&a, &file)?;
            report_files(&synth::run(&s)?);
        }
        Command::Train(a) => {
            let file = load_config(a.common.config.as_deref(), "train")?;
            let s = train::TrainSettings::resolve(&a, &file)?;
            report_files(&train::run(&s)?);
        }
    }
    Ok(())
}
