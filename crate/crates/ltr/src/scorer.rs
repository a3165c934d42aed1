//! Fully connected scoring network with rectifier activations and inverted
//! dropout, plus its reverse pass.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use crate::error::{LtrError, Result};

/// Maps a feature vector to one real score.
///
/// Parameters are stored flat, layer by layer: the `out × in` weight matrix
/// (row-major) followed by the `out` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Scorer {
    sizes: Vec<usize>,
    params: Vec<f64>,
    dropout: f64,
}

/// Intermediate values of a forward pass over one query's documents.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    n_docs: usize,
    /// Input to each layer, `n_docs × sizes[k]`.
    inputs: Vec<Vec<f64>>,
    /// Rectifier-and-dropout multiplier applied to each hidden layer's
    /// pre-activation: 0 where inactive or dropped, `1/(1−p)` where kept.
    gates: Vec<Vec<f64>>,
}

impl Scorer {
    /// A network with the given hidden widths (empty for a linear model) and
    /// He-normal initial weights.
    pub fn new<R: Rng + ?Sized>(
        n_features: usize,
        hidden: &[usize],
        dropout: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if n_features == 0 || hidden.contains(&0) {
            return Err(LtrError::Configuration(
                "layer widths must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&dropout) {
            return Err(LtrError::Configuration(format!(
                "dropout must lie in [0, 1), got {dropout}"
            )));
        }
        let mut sizes = vec![n_features];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut params = Vec::with_capacity(param_count(&sizes));
        for w in sizes.windows(2) {
            let normal = Normal::new(0.0, (2.0 / w[0] as f64).sqrt()).expect("positive std");
            params.extend((0..w[0] * w[1]).map(|_| normal.sample(rng)));
            params.extend(std::iter::repeat_n(0.0, w[1]));
        }
        Ok(Scorer {
            sizes,
            params,
            dropout,
        })
    }

    pub fn from_parts(sizes: Vec<usize>, params: Vec<f64>, dropout: f64) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) || sizes.last() != Some(&1) {
            return Err(LtrError::Configuration(format!(
                "invalid layer sizes {sizes:?}"
            )));
        }
        if params.len() != param_count(&sizes) {
            return Err(LtrError::Configuration(format!(
                "{} parameters for layer sizes {sizes:?}",
                params.len()
            )));
        }
        if !(0.0..1.0).contains(&dropout) {
            return Err(LtrError::Configuration(format!(
                "invalid dropout {dropout}"
            )));
        }
        Ok(Scorer {
            sizes,
            params,
            dropout,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_features(&self) -> usize {
        self.sizes[0]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn dropout(&self) -> f64 {
        self.dropout
    }

    /// Scores without dropout. Deterministic in `(θ, features)`.
    pub fn score(&self, features: &[f64], n_docs: usize) -> Vec<f64> {
        self.forward(features, n_docs, None).0
    }

    /// Scores with dropout masks drawn from `rng` when the rate is positive,
    /// keeping what the reverse pass needs.
    pub fn forward_train<R: Rng>(
        &self,
        features: &[f64],
        n_docs: usize,
        rng: &mut R,
    ) -> (Vec<f64>, ForwardCache) {
        self.forward(features, n_docs, Some(rng as &mut dyn RngCore))
    }

    /// Forward pass without dropout that still records a cache.
    pub fn forward_eval(&self, features: &[f64], n_docs: usize) -> (Vec<f64>, ForwardCache) {
        self.forward(features, n_docs, None)
    }

    fn forward(
        &self,
        features: &[f64],
        n_docs: usize,
        mut rng: Option<&mut dyn RngCore>,
    ) -> (Vec<f64>, ForwardCache) {
        assert_eq!(
            features.len(),
            n_docs * self.sizes[0],
            "feature matrix shape"
        );
        let n_layers = self.sizes.len() - 1;
        let keep = 1.0 / (1.0 - self.dropout);
        let mut inputs = Vec::with_capacity(n_layers);
        let mut gates = Vec::with_capacity(n_layers - 1);
        let mut act = features.to_vec();
        let mut offset = 0;
        for k in 0..n_layers {
            let (fan_in, fan_out) = (self.sizes[k], self.sizes[k + 1]);
            let w = &self.params[offset..offset + fan_in * fan_out];
            let b = &self.params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
            offset += fan_in * fan_out + fan_out;
            let mut z = vec![0.0; n_docs * fan_out];
            for d in 0..n_docs {
                let x = &act[d * fan_in..(d + 1) * fan_in];
                for (o, zo) in z[d * fan_out..(d + 1) * fan_out].iter_mut().enumerate() {
                    let row = &w[o * fan_in..(o + 1) * fan_in];
                    *zo = b[o] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                }
            }
            inputs.push(act);
            if k + 1 < n_layers {
                let mut gate = vec![0.0; z.len()];
                for (g, zi) in gate.iter_mut().zip(z.iter_mut()) {
                    let dropped = match rng.as_deref_mut() {
                        Some(r) if self.dropout > 0.0 => r.random::<f64>() < self.dropout,
                        _ => false,
                    };
                    let scale = if rng.is_some() && self.dropout > 0.0 {
                        keep
                    } else {
                        1.0
                    };
                    *g = if *zi > 0.0 && !dropped { scale } else { 0.0 };
                    *zi *= *g;
                }
                gates.push(gate);
            }
            act = z;
        }
        (
            act,
            ForwardCache {
                n_docs,
                inputs,
                gates,
            },
        )
    }

    /// Gradient of the parameters given `∂L/∂score` for each document.
    pub fn backward(&self, cache: &ForwardCache, grad_scores: &[f64]) -> Vec<f64> {
        let n = cache.n_docs;
        assert_eq!(grad_scores.len(), n);
        let n_layers = self.sizes.len() - 1;
        let mut grads = vec![0.0; self.params.len()];
        let mut offsets = Vec::with_capacity(n_layers);
        let mut at = 0;
        for k in 0..n_layers {
            offsets.push(at);
            at += self.sizes[k] * self.sizes[k + 1] + self.sizes[k + 1];
        }
        let mut g = grad_scores.to_vec();
        for k in (0..n_layers).rev() {
            let (fan_in, fan_out) = (self.sizes[k], self.sizes[k + 1]);
            let off = offsets[k];
            let x = &cache.inputs[k];
            {
                let (gw, gb) =
                    grads[off..off + fan_in * fan_out + fan_out].split_at_mut(fan_in * fan_out);
                for d in 0..n {
                    let xd = &x[d * fan_in..(d + 1) * fan_in];
                    for o in 0..fan_out {
                        let go = g[d * fan_out + o];
                        if go == 0.0 {
                            continue;
                        }
                        gb[o] += go;
                        for (gwi, xi) in gw[o * fan_in..(o + 1) * fan_in].iter_mut().zip(xd) {
                            *gwi += go * xi;
                        }
                    }
                }
            }
            if k == 0 {
                break;
            }
            let w = &self.params[off..off + fan_in * fan_out];
            let gate = &cache.gates[k - 1];
            let mut prev = vec![0.0; n * fan_in];
            for d in 0..n {
                let pd = &mut prev[d * fan_in..(d + 1) * fan_in];
                for o in 0..fan_out {
                    let go = g[d * fan_out + o];
                    if go == 0.0 {
                        continue;
                    }
                    for (p, wi) in pd.iter_mut().zip(&w[o * fan_in..(o + 1) * fan_in]) {
                        *p += go * wi;
                    }
                }
                for (p, gt) in pd.iter_mut().zip(&gate[d * fan_in..(d + 1) * fan_in]) {
                    *p *= gt;
                }
            }
            g = prev;
        }
        grads
    }
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}
