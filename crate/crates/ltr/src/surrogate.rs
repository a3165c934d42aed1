//! Differentiable stand-ins for sampling a ranking from a Plackett-Luce
//! model: Gumbel-perturbed softmax, smooth ranks, and exposure with a
//! straight-through gradient.

use rand::Rng;

use expexp_core::{BrowsingModel, ModelKind};

/// Standard Gumbel draws `−ln(−ln u)`, `u ~ Uniform(0,1)`.
pub fn gumbel_noise<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u = loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    break u;
                }
            };
            -(-u.ln()).ln()
        })
        .collect()
}

/// `softmax(scores + noise)` with max subtraction. Passing zero noise gives
/// the plain softmax.
pub fn softmax_with_noise(scores: &[f64], noise: &[f64]) -> Vec<f64> {
    debug_assert_eq!(scores.len(), noise.len());
    let z: Vec<f64> = scores.iter().zip(noise).map(|(s, g)| s + g).collect();
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    p
}

pub fn gumbel_perturbed_probs<R: Rng + ?Sized>(scores: &[f64], rng: &mut R) -> Vec<f64> {
    softmax_with_noise(scores, &gumbel_noise(scores.len(), rng))
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Fractional ranks `r_d = Σ_{d'≠d} σ((p_{d'} − p_d)/τ)`, base 0.
pub fn smooth_ranks(p: &[f64], tau: f64) -> Vec<f64> {
    (0..p.len())
        .map(|d| {
            p.iter()
                .enumerate()
                .filter(|&(e, _)| e != d)
                .map(|(_, &q)| sigmoid((q - p[d]) / tau))
                .sum()
        })
        .collect()
}

/// Reverse pass of [`smooth_ranks`]: `∂L/∂p` from `∂L/∂r`.
pub fn smooth_ranks_backward(p: &[f64], tau: f64, grad_ranks: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut g = vec![0.0; n];
    for j in 0..n {
        for d in (j + 1)..n {
            let s = sigmoid((p[j] - p[d]) / tau);
            let w = s * (1.0 - s) / tau;
            let diff = grad_ranks[d] - grad_ranks[j];
            g[j] += w * diff;
            g[d] -= w * diff;
        }
    }
    g
}

/// Reverse pass of the softmax: `∂L/∂z = p ⊙ (∂L/∂p − ⟨∂L/∂p, p⟩)`.
pub fn softmax_backward(p: &[f64], grad_p: &[f64]) -> Vec<f64> {
    let dot: f64 = p.iter().zip(grad_p).map(|(a, b)| a * b).sum();
    p.iter()
        .zip(grad_p)
        .map(|(pi, gi)| pi * (gi - dot))
        .collect()
}

/// Base-0 ranks when sorting `values` descending; ties go to the lower index.
pub fn true_ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut ranks = vec![0; values.len()];
    for (r, &d) in order.iter().enumerate() {
        ranks[d] = r;
    }
    ranks
}

/// How exposure treats ranks in the forward pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExposureMode {
    /// Forward on true integer ranks, gradient through smooth ranks.
    StraightThrough,
    /// Forward and gradient both on smooth ranks; used to check gradients.
    Smooth,
}

/// Per-document exposure of one sampled ranking and its slope with respect
/// to that document's smooth rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankExposure {
    pub values: Vec<f64>,
    pub slope: Vec<f64>,
}

/// Exposure from ranks under `model`.
///
/// Each document's exposure is `c_d γ^{rank}` where `c_d` is 0 beyond the
/// depth and, under ERR, the continuation product of the documents ahead of
/// it in the true order (grades are known at training time). The gradient
/// always differentiates `c_d γ^{r̃_d}`.
pub fn exposure_from_ranks(
    ranks: &[usize],
    smooth: &[f64],
    grades: &[u32],
    model: &BrowsingModel,
    mode: ExposureMode,
) -> RankExposure {
    let n = ranks.len();
    let gamma = model.gamma();
    let mut order = vec![0; n];
    for (d, &r) in ranks.iter().enumerate() {
        order[r] = d;
    }
    let mut carry = vec![0.0; n];
    let mut reach = 1.0;
    for (r, &d) in order.iter().enumerate() {
        carry[d] = if model.within_depth(r) { reach } else { 0.0 };
        if model.kind() == ModelKind::Err {
            reach *= 1.0 - model.stop_map().phi(grades[d]);
        }
    }
    let ln_gamma = gamma.ln();
    let mut values = vec![0.0; n];
    let mut slope = vec![0.0; n];
    for d in 0..n {
        let soft = gamma.powf(smooth[d]);
        slope[d] = carry[d] * ln_gamma * soft;
        values[d] = carry[d]
            * match mode {
                ExposureMode::StraightThrough => gamma.powi(ranks[d] as i32),
                ExposureMode::Smooth => soft,
            };
    }
    RankExposure { values, slope }
}

/// Everything the reverse pass needs from one Gumbel sample.
#[derive(Debug, Clone)]
pub struct SampleTrace {
    pub probs: Vec<f64>,
    pub smooth: Vec<f64>,
    pub exposure: RankExposure,
}

/// Forward pass of one sample: perturb, softmax, rank, expose.
pub fn sample_forward(
    scores: &[f64],
    noise: &[f64],
    grades: &[u32],
    model: &BrowsingModel,
    tau: f64,
    mode: ExposureMode,
) -> SampleTrace {
    let probs = softmax_with_noise(scores, noise);
    let smooth = smooth_ranks(&probs, tau);
    let perturbed: Vec<f64> = scores.iter().zip(noise).map(|(s, g)| s + g).collect();
    let ranks = true_ranks(&perturbed);
    let exposure = exposure_from_ranks(&ranks, &smooth, grades, model, mode);
    SampleTrace {
        probs,
        smooth,
        exposure,
    }
}

/// Reverse pass of one sample: `∂L/∂scores` from `∂L/∂exposure`.
pub fn sample_backward(trace: &SampleTrace, tau: f64, grad_exposure: &[f64]) -> Vec<f64> {
    let grad_ranks: Vec<f64> = grad_exposure
        .iter()
        .zip(&trace.exposure.slope)
        .map(|(g, s)| g * s)
        .collect();
    let grad_p = smooth_ranks_backward(&trace.probs, tau, &grad_ranks);
    softmax_backward(&trace.probs, &grad_p)
}
