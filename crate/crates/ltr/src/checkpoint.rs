//! Scorer checkpoints as JSON.
//!
//! ```json
//! {
//!   "format": "expexp-scorer",
//!   "version": 1,
//!   "layer_sizes": [10, 256, 256, 1],
//!   "dropout": 0.1,
//!   "params": [...],
//!   "scaler": { "min": [...], "max": [...] },
//!   "objective": "ee",
//!   "lambda": 0.5
//! }
//! ```
//!
//! `params` holds each layer in turn: the weight matrix (`out × in`,
//! row-major) followed by the bias. Floats are written in shortest
//! round-trip form, so a load restores parameters bit for bit. `scaler`,
//! `objective` and `lambda` may be null.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use expexp_core::dataset::MinMaxScaler;

use crate::error::{LtrError, Result};
use crate::objective::Objective;
use crate::scorer::Scorer;

pub const FORMAT: &str = "expexp-scorer";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerBounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub layer_sizes: Vec<usize>,
    pub dropout: f64,
    pub params: Vec<f64>,
    pub scaler: Option<ScalerBounds>,
    pub objective: Option<String>,
    pub lambda: Option<f64>,
}

impl Checkpoint {
    pub fn new(
        scorer: &Scorer,
        scaler: Option<&MinMaxScaler>,
        objective: Option<Objective>,
        lambda: Option<f64>,
    ) -> Self {
        Checkpoint {
            format: FORMAT.into(),
            version: VERSION,
            layer_sizes: scorer.sizes().to_vec(),
            dropout: scorer.dropout(),
            params: scorer.params().to_vec(),
            scaler: scaler.map(|s| {
                let (min, max) = s.bounds();
                ScalerBounds {
                    min: min.to_vec(),
                    max: max.to_vec(),
                }
            }),
            objective: objective.map(|o| o.name().to_string()),
            lambda,
        }
    }

    pub fn scorer(&self) -> Result<Scorer> {
        Scorer::from_parts(self.layer_sizes.clone(), self.params.clone(), self.dropout)
    }

    pub fn scaler(&self) -> Result<Option<MinMaxScaler>> {
        self.scaler
            .as_ref()
            .map(|b| MinMaxScaler::from_bounds(b.min.clone(), b.max.clone()).map_err(Into::into))
            .transpose()
    }

    pub fn objective(&self) -> Result<Option<Objective>> {
        self.objective.as_deref().map(str::parse).transpose()
    }

    pub fn save<W: Write>(&self, w: W) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let scaler_ok = self
            .scaler
            .as_ref()
            .is_none_or(|b| finite(&b.min) && finite(&b.max));
        if !finite(&self.params) || !scaler_ok {
            return Err(LtrError::Checkpoint(
                "non-finite value in checkpoint".into(),
            ));
        }
        serde_json::to_writer_pretty(w, self).map_err(|e| LtrError::Checkpoint(e.to_string()))
    }

    pub fn load<R: Read>(r: R) -> Result<Self> {
        let c: Checkpoint =
            serde_json::from_reader(r).map_err(|e| LtrError::Checkpoint(e.to_string()))?;
        if c.format != FORMAT {
            return Err(LtrError::Checkpoint(format!(
                "unknown format `{}`",
                c.format
            )));
        }
        if c.version != VERSION {
            return Err(LtrError::Checkpoint(format!(
                "unsupported version {} (expected {VERSION})",
                c.version
            )));
        }
        c.scorer()?;
        c.scaler()?;
        c.objective()?;
        Ok(c)
    }
}
