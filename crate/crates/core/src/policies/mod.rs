//! Stochastic ranking policies.
//!
//! Every policy is an immutable description; sampling takes a caller-owned
//! RNG so concurrent evaluation can use independent streams.

mod run;
mod sweep;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::judgments::RelevanceJudgments;
use crate::perm::{all_permutations, factorial};
use crate::ranking::Ranking;

pub use run::{preprocess_scores, ScoredRun};
pub use sweep::{sweep, PolicyFamily, SweepConfig, SweepOutcome};

/// Default number of top documents a randomized policy reorders.
pub const DEFAULT_RERANK_DEPTH: usize = 100;

/// A distribution over rankings of a judgment pool.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// Point mass on one ranking.
    Deterministic(Ranking),
    PlackettLuce(PlackettLuce),
    RankTransposition(RankTransposition),
    /// Uniform over all grade-sorted permutations of the pool.
    Oracle(Oracle),
}

/// Sequential sampling without replacement, `p(d) ∝ exp(log_weight(d))`, over
/// the first `log_weights.len()` documents of `base`. The rest keep their
/// order after the sampled prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct PlackettLuce {
    base: Vec<usize>,
    log_weights: Vec<f64>,
}

/// `k ~ Geometric(β)` uniformly random position swaps within the first
/// `depth` positions of `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTransposition {
    base: Vec<usize>,
    beta: f64,
    depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Oracle {
    blocks: Vec<Vec<usize>>,
}

fn check_rerank_depth(rerank_depth: usize) -> Result<()> {
    if rerank_depth == 0 {
        return Err(Error::InvalidPolicy("rerank depth must be positive".into()));
    }
    Ok(())
}

impl Policy {
    pub fn deterministic(ranking: Ranking) -> Self {
        Policy::Deterministic(ranking)
    }

    /// The run's own static ranking.
    pub fn static_run(run: &ScoredRun, judgments: &RelevanceJudgments) -> Result<Self> {
        let order = run.pool_order(judgments)?;
        Ok(Policy::Deterministic(Ranking::new(order, judgments.len())?))
    }

    /// Plackett-Luce over the run's top `rerank_depth` documents with
    /// `p(d) ∝ s_d^α` on preprocessed (strictly positive) scores.
    pub fn plackett_luce(
        run: &ScoredRun,
        judgments: &RelevanceJudgments,
        alpha: f64,
        rerank_depth: usize,
    ) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidPolicy(format!(
                "α must be finite and ≥ 0, got {alpha}"
            )));
        }
        check_rerank_depth(rerank_depth)?;
        let base = run.pool_order(judgments)?;
        let m = rerank_depth.min(base.len());
        let scores: Vec<f64> = run.entries()[..m].iter().map(|(_, s)| *s).collect();
        let positive = preprocess_scores(&scores)?;
        let log_weights = positive
            .iter()
            .map(|&s| if alpha == 0.0 { 0.0 } else { alpha * s.ln() })
            .collect();
        Ok(Policy::PlackettLuce(PlackettLuce { base, log_weights }))
    }

    /// Plackett-Luce with `p(d) ∝ exp(logit_d)`; `logits[i]` belongs to
    /// `base[i]`. Only the first `rerank_depth` entries are resampled.
    pub fn plackett_luce_logits(
        base: Vec<usize>,
        logits: &[f64],
        pool_len: usize,
        rerank_depth: usize,
    ) -> Result<Self> {
        check_rerank_depth(rerank_depth)?;
        if logits.len() != base.len() {
            return Err(Error::Dimension {
                left: base.len(),
                right: logits.len(),
            });
        }
        if let Some(&bad) = logits.iter().find(|l| !l.is_finite()) {
            return Err(Error::InvalidPolicy(format!("non-finite logit {bad}")));
        }
        Ranking::new(base.clone(), pool_len)?;
        let m = rerank_depth.min(base.len());
        Ok(Policy::PlackettLuce(PlackettLuce {
            base,
            log_weights: logits[..m].to_vec(),
        }))
    }

    /// Uniformly random permutation of a pool of `n` documents.
    pub fn uniform(n: usize) -> Self {
        Policy::PlackettLuce(PlackettLuce {
            base: (0..n).collect(),
            log_weights: vec![0.0; n],
        })
    }

    /// Rank-transposition randomization of the run's static ranking.
    pub fn rank_transposition(
        run: &ScoredRun,
        judgments: &RelevanceJudgments,
        beta: f64,
        rerank_depth: usize,
    ) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidPolicy(format!(
                "β must lie in (0,1], got {beta}"
            )));
        }
        check_rerank_depth(rerank_depth)?;
        let base = run.pool_order(judgments)?;
        let depth = rerank_depth.min(base.len());
        Ok(Policy::RankTransposition(RankTransposition {
            base,
            beta,
            depth,
        }))
    }

    pub fn oracle(judgments: &RelevanceJudgments) -> Self {
        let max = judgments.max_grade() as usize;
        let mut blocks = vec![Vec::new(); max + 1];
        for (d, &g) in judgments.grades().iter().enumerate() {
            blocks[g as usize].push(d);
        }
        blocks.reverse();
        blocks.retain(|b| !b.is_empty());
        Policy::Oracle(Oracle { blocks })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Policy::Deterministic(_) => "det",
            Policy::PlackettLuce(_) => "pl",
            Policy::RankTransposition(_) => "rt",
            Policy::Oracle(_) => "oracle",
        }
    }

    /// Draws one ranking.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Ranking {
        match self {
            Policy::Deterministic(r) => r.clone(),
            Policy::PlackettLuce(pl) => pl.sample(rng),
            Policy::RankTransposition(rt) => rt.sample(rng),
            Policy::Oracle(o) => o.sample(rng),
        }
    }

    /// Every ranking with positive probability, with its probability.
    ///
    /// Only available when the randomized part has at most `cap` documents.
    pub fn support(&self, cap: usize) -> Result<Vec<(Ranking, f64)>> {
        match self {
            Policy::Deterministic(r) => Ok(vec![(r.clone(), 1.0)]),
            Policy::PlackettLuce(pl) => pl.support(cap),
            Policy::RankTransposition(rt) => rt.support(cap),
            Policy::Oracle(o) => o.support(cap),
        }
    }
}

impl PlackettLuce {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Ranking {
        let m = self.log_weights.len();
        let mut remaining: Vec<usize> = (0..m).collect();
        let mut weights = vec![0.0; m];
        let mut order = Vec::with_capacity(self.base.len());
        while remaining.len() > 1 {
            let max = remaining
                .iter()
                .map(|&i| self.log_weights[i])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for (w, &i) in weights.iter_mut().zip(&remaining) {
                *w = (self.log_weights[i] - max).exp();
                total += *w;
            }
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = remaining.len() - 1;
            for (k, w) in weights[..remaining.len()].iter().enumerate() {
                acc += w;
                if u < acc {
                    pick = k;
                    break;
                }
            }
            order.push(self.base[remaining.remove(pick)]);
        }
        order.extend(remaining.iter().map(|&i| self.base[i]));
        order.extend_from_slice(&self.base[m..]);
        Ranking::from_order_unchecked(order)
    }

    /// Probability of drawing the prefix order `perm` (indices into the prefix).
    fn probability(&self, perm: &[usize]) -> f64 {
        let mut log_p = 0.0;
        for (k, &i) in perm.iter().enumerate() {
            let rest = &perm[k..];
            let max = rest
                .iter()
                .map(|&j| self.log_weights[j])
                .fold(f64::NEG_INFINITY, f64::max);
            let lse = max
                + rest
                    .iter()
                    .map(|&j| (self.log_weights[j] - max).exp())
                    .sum::<f64>()
                    .ln();
            log_p += self.log_weights[i] - lse;
        }
        log_p.exp()
    }

    fn support(&self, cap: usize) -> Result<Vec<(Ranking, f64)>> {
        let m = self.log_weights.len();
        if m > cap {
            return Err(Error::EnumerationCap { pool: m, cap });
        }
        let prefix: Vec<usize> = (0..m).collect();
        Ok(all_permutations(&prefix)
            .into_iter()
            .map(|perm| {
                let p = self.probability(&perm);
                let mut order: Vec<usize> = perm.iter().map(|&i| self.base[i]).collect();
                order.extend_from_slice(&self.base[m..]);
                (Ranking::from_order_unchecked(order), p)
            })
            .collect())
    }
}

impl RankTransposition {
    fn swaps<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.beta >= 1.0 {
            return 0;
        }
        Geometric::new(self.beta)
            .expect("β validated in (0,1)")
            .sample(rng)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Ranking {
        let mut order = self.base.clone();
        let k = self.swaps(rng);
        for _ in 0..k {
            let i = rng.random_range(0..self.depth);
            let j = rng.random_range(0..self.depth);
            order.swap(i, j);
        }
        Ranking::from_order_unchecked(order)
    }

    /// Mixes the geometric number of steps of the transposition walk over all
    /// prefix permutations. The series is cut once the remaining mass times the
    /// walk's distance from uniform drops below 1e-15; that remainder is
    /// assigned uniformly.
    fn support(&self, cap: usize) -> Result<Vec<(Ranking, f64)>> {
        let m = self.depth;
        if m > cap {
            return Err(Error::EnumerationCap { pool: m, cap });
        }
        let prefix: Vec<usize> = (0..m).collect();
        let states = all_permutations(&prefix);
        let lookup: HashMap<&[usize], usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        let mut moves: Vec<Vec<usize>> = Vec::with_capacity(states.len());
        for s in &states {
            let mut next = Vec::with_capacity(m * (m.saturating_sub(1)) / 2);
            for i in 0..m {
                for j in (i + 1)..m {
                    let mut t = s.clone();
                    t.swap(i, j);
                    next.push(lookup[t.as_slice()]);
                }
            }
            moves.push(next);
        }
        let n_states = states.len();
        let stay = 1.0 / m as f64;
        let pair = 2.0 / (m * m) as f64;
        let uniform = 1.0 / n_states as f64;

        let mut dist = vec![0.0; n_states];
        dist[0] = 1.0;
        let mut acc = vec![0.0; n_states];
        let mut tail = 1.0;
        let mut next = vec![0.0; n_states];
        loop {
            for (a, d) in acc.iter_mut().zip(&dist) {
                *a += self.beta * tail * d;
            }
            tail *= 1.0 - self.beta;
            if tail < 1e-16 {
                break;
            }
            next.iter_mut().for_each(|x| *x = 0.0);
            for (s, &p) in dist.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                next[s] += stay * p;
                for &t in &moves[s] {
                    next[t] += pair * p;
                }
            }
            std::mem::swap(&mut dist, &mut next);
            let tv: f64 = 0.5 * dist.iter().map(|p| (p - uniform).abs()).sum::<f64>();
            if tail * tv < 1e-15 {
                acc.iter_mut().for_each(|a| *a += tail * uniform);
                break;
            }
        }
        Ok(states
            .into_iter()
            .zip(acc)
            .map(|(perm, p)| {
                let mut order: Vec<usize> = perm.iter().map(|&i| self.base[i]).collect();
                order.extend_from_slice(&self.base[m..]);
                (Ranking::from_order_unchecked(order), p)
            })
            .collect())
    }
}

impl Oracle {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Ranking {
        let mut order = Vec::with_capacity(self.blocks.iter().map(Vec::len).sum());
        for block in &self.blocks {
            let start = order.len();
            order.extend_from_slice(block);
            order[start..].shuffle(rng);
        }
        Ranking::from_order_unchecked(order)
    }

    fn support(&self, cap: usize) -> Result<Vec<(Ranking, f64)>> {
        let n: usize = self.blocks.iter().map(Vec::len).sum();
        if n > cap {
            return Err(Error::EnumerationCap { pool: n, cap });
        }
        let per_block: Vec<Vec<Vec<usize>>> =
            self.blocks.iter().map(|b| all_permutations(b)).collect();
        let count: usize = self.blocks.iter().map(|b| factorial(b.len())).product();
        let p = 1.0 / count as f64;
        let mut out = Vec::with_capacity(count);
        let mut choice = vec![0usize; per_block.len()];
        loop {
            let order: Vec<usize> = choice
                .iter()
                .zip(&per_block)
                .flat_map(|(&c, perms)| perms[c].iter().copied())
                .collect();
            out.push((Ranking::from_order_unchecked(order), p));
            // odometer over block permutations
            let mut k = per_block.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < per_block[k].len() {
                    break;
                }
                choice[k] = 0;
            }
        }
    }
}
