//! Brute-force reference computations shared by the integration tests. These
//! deliberately avoid the library's exposure and policy code paths.

#![allow(dead_code)]

/// All permutations of `0..n` by recursive insertion.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Browsing model parameters in plain form. `phi = None` means RBP.
#[derive(Clone, Debug)]
pub struct Params {
    pub gamma: f64,
    pub depth: Option<usize>,
    pub phi: Option<Vec<f64>>,
}

impl Params {
    fn stop(&self, grade: u32) -> f64 {
        match &self.phi {
            None => 0.0,
            Some(t) => t[(grade as usize).min(t.len() - 1)],
        }
    }
}

/// Exposure of each document (indexed by pool position) under `order`.
pub fn exposure_of(order: &[usize], grades: &[u32], p: &Params) -> Vec<f64> {
    let mut e = vec![0.0; grades.len()];
    let limit = p.depth.unwrap_or(usize::MAX);
    let mut survive = 1.0;
    for (rank, &d) in order.iter().enumerate() {
        if rank >= limit {
            break;
        }
        e[d] = p.gamma.powi(rank as i32) * survive;
        survive *= 1.0 - p.stop(grades[d]);
    }
    e
}

/// Rankings whose grades are non-increasing, found by filtering all `n!`
/// permutations.
pub fn grade_sorted_permutations(grades: &[u32]) -> Vec<Vec<usize>> {
    permutations(grades.len())
        .into_iter()
        .filter(|perm| perm.windows(2).all(|w| grades[w[0]] >= grades[w[1]]))
        .collect()
}

/// Mean exposure over equally likely rankings.
pub fn mean_exposure(perms: &[Vec<usize>], grades: &[u32], p: &Params) -> Vec<f64> {
    let mut sum = vec![0.0; grades.len()];
    for perm in perms {
        for (s, e) in sum.iter_mut().zip(exposure_of(perm, grades, p)) {
            *s += e;
        }
    }
    sum.iter().map(|s| s / perms.len() as f64).collect()
}

/// Expected exposure of the uniform distribution over rankings whose grades
/// are non-increasing.
pub fn oracle_by_enumeration(grades: &[u32], p: &Params) -> Vec<f64> {
    mean_exposure(&grade_sorted_permutations(grades), grades, p)
}

/// Expected exposure of a uniformly random permutation.
pub fn uniform_by_enumeration(grades: &[u32], p: &Params) -> Vec<f64> {
    mean_exposure(&permutations(grades.len()), grades, p)
}

/// Multisets of `n` grades from `0..=max_grade`, as non-increasing vectors.
pub fn grade_multisets(n: usize, max_grade: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in grade_multisets(n - 1, max_grade) {
        let top = rest.first().copied().unwrap_or(0);
        for g in top..=max_grade {
            let mut v = vec![g];
            v.extend(&rest);
            out.push(v);
        }
    }
    out
}

/// Plackett-Luce probability of `perm` with positive weights `w`.
pub fn pl_probability(perm: &[usize], w: &[f64]) -> f64 {
    let mut p = 1.0;
    for k in 0..perm.len() {
        let rest: f64 = perm[k..].iter().map(|&i| w[i]).sum();
        p *= w[perm[k]] / rest;
    }
    p
}

/// Distribution of the lazy random-transposition walk started at the
/// identity after a Geometric(β) number of steps (failures before the first
/// success), by dense matrix iteration over all `n!` states.
pub fn rt_distribution(n: usize, beta: f64) -> Vec<(Vec<usize>, f64)> {
    let states = permutations(n);
    let idx = |s: &[usize]| states.iter().position(|t| t == s).unwrap();
    let size = states.len();
    let mut trans = vec![vec![0.0; size]; size];
    let step = 1.0 / (n * n) as f64;
    for (a, s) in states.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let mut t = s.clone();
                t.swap(i, j);
                trans[a][idx(&t)] += step;
            }
        }
    }
    let start = idx(&(0..n).collect::<Vec<_>>());
    let mut dist = vec![0.0; size];
    dist[start] = 1.0;
    let mut out = vec![0.0; size];
    let mut weight = beta;
    let mut k = 0;
    while weight > 1e-18 && k < 100_000 {
        for (o, d) in out.iter_mut().zip(&dist) {
            *o += weight * d;
        }
        let mut next = vec![0.0; size];
        for a in 0..size {
            if dist[a] == 0.0 {
                continue;
            }
            for b in 0..size {
                next[b] += dist[a] * trans[a][b];
            }
        }
        dist = next;
        weight *= 1.0 - beta;
        k += 1;
    }
    states.into_iter().zip(out).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
