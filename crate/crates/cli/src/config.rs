//! Config files and flag/file/default resolution.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use expexp_core::{BrowsingModel, ModelKind, StopMap};

use crate::args::ModelArgs;

pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_DEPTH: usize = 20;
pub const DEFAULT_SAMPLES: usize = 50;
pub const DEFAULT_RERANK_DEPTH: usize = 100;
pub const DEFAULT_OUT: &str = "out";

/// `key = value` lines; `#` starts a comment, blank lines are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str, allowed: &[String]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected `key = value`", i + 1))?;
            let key = key.trim().replace('_', "-");
            if !allowed.contains(&key) {
                bail!("config line {}: unknown key `{key}`", i + 1);
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                bail!("config line {}: duplicate key `{key}`", i + 1);
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: Option<&Path>, allowed: &[String]) -> Result<Self> {
        match path {
            None => Ok(ConfigFile::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                ConfigFile::parse(&text, allowed).with_context(|| format!("in {}", p.display()))
            }
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag if given, else the file's value, else `None`.
    pub fn opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| anyhow!("config key `{key}`: invalid value `{v}`: {e}"))
            })
            .transpose()
    }

    pub fn get<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        self.get(None, key, false)
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.or_else(|| self.raw(key).map(PathBuf::from))
    }

    pub fn list<T>(&self, flag: Option<String>, key: &str) -> Result<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.opt(flag, key)?
            .map(|s: String| parse_list(&s).with_context(|| format!("--{key}")))
            .transpose()
    }
}

/// Comma-separated values; an empty string is an empty list.
pub fn parse_list<T>(s: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|e| anyhow!("invalid list entry `{t}`: {e}"))
        })
        .collect()
}

/// Browsing model settings before the data's maximum grade is known.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSettings {
    pub kind: ModelKind,
    pub gamma: f64,
    pub depth: Option<usize>,
    pub phi: Option<Vec<f64>>,
}

impl ModelSettings {
    pub fn resolve(args: &ModelArgs, file: &ConfigFile) -> Result<Self> {
        let kind = match file
            .get(args.model.clone(), "model", "rbp".to_string())?
            .as_str()
        {
            "rbp" => ModelKind::Rbp,
            "err" => ModelKind::Err,
            other => bail!("unknown browsing model `{other}` (expected rbp or err)"),
        };
        let depth = file.get(args.depth, "depth", DEFAULT_DEPTH)?;
        Ok(ModelSettings {
            kind,
            gamma: file.get(args.gamma, "gamma", DEFAULT_GAMMA)?,
            depth: (depth > 0).then_some(depth),
            phi: file.list(args.phi.clone(), "phi")?,
        })
    }

    /// The model; without an explicit φ table ERR uses the exponential map
    /// up to `max_grade`.
    pub fn build(&self, max_grade: u32) -> Result<BrowsingModel> {
        let stop = match &self.phi {
            Some(t) => StopMap::new(t.clone())?,
            None => StopMap::exponential(max_grade),
        };
        Ok(BrowsingModel::new(self.kind, self.gamma, self.depth, stop)?)
    }

    pub fn describe(&self) -> String {
        format!(
            "{} gamma={} depth={}",
            self.kind,
            self.gamma,
            self.depth.map_or("none".into(), |d| d.to_string())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn allowed() -> Vec<String> {
        ["gamma", "depth", "model", "phi", "rerank-depth"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    #[test]
    fn precedence_flag_then_file_then_default() {
        let f =
            ConfigFile::parse("gamma = 0.8  # comment\n\nrerank_depth=7\n", &allowed()).unwrap();
        assert_eq!(f.get(Some(0.3), "gamma", 0.5).unwrap(), 0.3);
        assert_eq!(f.get(None, "gamma", 0.5).unwrap(), 0.8);
        assert_eq!(f.get(None, "depth", 20usize).unwrap(), 20);
        assert_eq!(f.get(None, "rerank-depth", 100usize).unwrap(), 7);
    }

    #[test]
    fn unknown_duplicate_and_malformed_keys_fail() {
        assert!(ConfigFile::parse("gama = 1", &allowed()).is_err());
        assert!(ConfigFile::parse("gamma = 1\ngamma = 2", &allowed()).is_err());
        assert!(ConfigFile::parse("gamma 1", &allowed()).is_err());
        let f = ConfigFile::parse("gamma = x", &allowed()).unwrap();
        assert!(f.get::<f64>(None, "gamma", 0.5).is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(
            parse_list::<f64>("0, 0.5,inf").unwrap(),
            vec![0.0, 0.5, f64::INFINITY]
        );
        assert_eq!(parse_list::<usize>("").unwrap(), Vec::<usize>::new());
        assert!(parse_list::<usize>("1,x").is_err());
    }

    #[test]
    fn model_defaults_match_protocol() {
        let args = ModelArgs {
            model: None,
            gamma: None,
            depth: None,
            phi: None,
        };
        let m = ModelSettings::resolve(&args, &ConfigFile::default()).unwrap();
        assert_eq!(m.kind, ModelKind::Rbp);
        assert_eq!(m.gamma, 0.5);
        assert_eq!(m.depth, Some(20));
        let no_depth = ModelArgs {
            depth: Some(0),
            ..args
        };
        assert_eq!(
            ModelSettings::resolve(&no_depth, &ConfigFile::default())
                .unwrap()
                .depth,
            None
        );
    }
}
