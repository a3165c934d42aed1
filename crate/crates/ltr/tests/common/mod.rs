//! Straight-line reimplementation of the training forward pass, used as a
//! finite-difference oracle. Shares nothing with the library but the
//! parameter layout.

#![allow(dead_code)]

pub struct Instance {
    pub sizes: Vec<usize>,
    pub n_docs: usize,
    pub features: Vec<f64>,
    pub grades: Vec<u32>,
    pub noise: Vec<Vec<f64>>,
    pub target: Vec<f64>,
    pub groups: Option<Vec<Vec<usize>>>,
    pub gamma: f64,
    pub depth: Option<usize>,
    /// Stop probability per grade; `None` for RBP.
    pub phi: Option<Vec<f64>>,
    pub tau: f64,
    pub lambda: f64,
}

pub fn mlp(sizes: &[usize], params: &[f64], features: &[f64], n_docs: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_docs);
    for d in 0..n_docs {
        let mut h: Vec<f64> = features[d * sizes[0]..(d + 1) * sizes[0]].to_vec();
        let mut off = 0;
        for (k, w) in sizes.windows(2).enumerate() {
            let (i, o) = (w[0], w[1]);
            let mut next = vec![0.0; o];
            for r in 0..o {
                let mut acc = params[off + i * o + r];
                for c in 0..i {
                    acc += params[off + r * i + c] * h[c];
                }
                next[r] = if k + 2 < sizes.len() {
                    acc.max(0.0)
                } else {
                    acc
                };
            }
            off += i * o + o;
            h = next;
        }
        out.push(h[0]);
    }
    out
}

/// Expected exposure over the fixed noise draws, using smooth ranks in the
/// exponent and the true (perturbed) order for the depth mask and the
/// cascade product.
pub fn smooth_exposure(inst: &Instance, scores: &[f64]) -> Vec<f64> {
    let n = inst.n_docs;
    let mut eps = vec![0.0; n];
    for g in &inst.noise {
        let z: Vec<f64> = (0..n).map(|d| scores[d] + g[d]).collect();
        let m = z.iter().cloned().fold(f64::MIN, f64::max);
        let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
        let tot: f64 = e.iter().sum();
        let p: Vec<f64> = e.iter().map(|v| v / tot).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| z[b].partial_cmp(&z[a]).unwrap().then(a.cmp(&b)));
        let mut carry = vec![0.0; n];
        let mut reach = 1.0;
        for (rank, &d) in order.iter().enumerate() {
            let visible = inst.depth.is_none_or(|k| rank < k);
            carry[d] = if visible { reach } else { 0.0 };
            if let Some(phi) = &inst.phi {
                reach *= 1.0 - phi[(inst.grades[d] as usize).min(phi.len() - 1)];
            }
        }
        for d in 0..n {
            let r: f64 = (0..n)
                .filter(|&j| j != d)
                .map(|j| 1.0 / (1.0 + ((p[d] - p[j]) / inst.tau).exp()))
                .sum();
            eps[d] += carry[d] * inst.gamma.powf(r) / inst.noise.len() as f64;
        }
    }
    eps
}

pub fn objective(inst: &Instance, eps: &[f64]) -> f64 {
    let rel: f64 = eps.iter().zip(&inst.target).map(|(a, b)| a * b).sum();
    let disp = match &inst.groups {
        None => eps.iter().map(|e| e * e).sum::<f64>(),
        Some(member) => {
            let n_groups = member.iter().flatten().max().map_or(0, |m| m + 1);
            let mut xi = vec![0.0; n_groups];
            for (d, gs) in member.iter().enumerate() {
                for &g in gs {
                    xi[g] += eps[d];
                }
            }
            xi.iter().map(|x| x * x).sum()
        }
    };
    inst.lambda * disp - (1.0 - inst.lambda) * rel
}

pub fn loss(inst: &Instance, params: &[f64]) -> f64 {
    let scores = mlp(&inst.sizes, params, &inst.features, inst.n_docs);
    objective(inst, &smooth_exposure(inst, &scores))
}

pub fn central_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut x = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + h;
            let up = f(&x);
            x[i] = orig - h;
            let down = f(&x);
            x[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, or the absolute difference when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale < 1e-12 {
        norm(&diff)
    } else {
        norm(&diff) / scale
    }
}
