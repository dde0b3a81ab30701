//! Canonical sampling: Metropolis-Hastings over Φ with the Bernoulli-Laplace
//! label-swap proposal.
//!
//! The chain swaps the labels of a uniformly chosen pair of ambiguous vertices
//! from different blocks, so block sizes never change. The acceptance ratio
//! only involves the neighborhoods of the swapped pair. With per-vertex counts
//! of neighbor labels maintained incrementally, evaluating it costs O(K) and
//! an accepted move costs O(deg(u) + deg(v)).

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::likelihood::LogTables;
use crate::nomination::{NominationList, SchemeTag};
use crate::rng::{self, Rng};
use crate::sbm::{block_edge_counts, BlockAssignment, SbmParams, SeededGraph};

pub const DEFAULT_AUDIT_INTERVAL: u64 = 100_000;

/// Chain length, burn-in and reproducibility settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McmcConfig {
    /// Total number of Metropolis-Hastings steps, burn-in included.
    pub n_steps: u64,
    pub burn_in: u64,
    pub rng_seed: u64,
    /// Steps between full recounts of the cached log-likelihood.
    pub audit_interval: u64,
}

impl McmcConfig {
    /// Half of the steps are burn-in.
    pub fn new(n_steps: u64, rng_seed: u64) -> Self {
        Self {
            n_steps,
            burn_in: n_steps / 2,
            rng_seed,
            audit_interval: DEFAULT_AUDIT_INTERVAL,
        }
    }

    /// `burn_in` discarded steps followed by `retained` sampling steps.
    pub fn with_fixed_burn_in(burn_in: u64, retained: u64, rng_seed: u64) -> Self {
        Self {
            n_steps: burn_in + retained,
            burn_in,
            rng_seed,
            audit_interval: DEFAULT_AUDIT_INTERVAL,
        }
    }

    pub fn retained(&self) -> u64 {
        self.n_steps - self.burn_in
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 || self.burn_in == 0 {
            return Err(Error::InvalidConfig("n_steps and burn_in must be positive".into()));
        }
        if self.burn_in >= self.n_steps {
            return Err(Error::InvalidConfig(format!(
                "burn-in {} must be smaller than the step count {}",
                self.burn_in, self.n_steps
            )));
        }
        if self.audit_interval == 0 {
            return Err(Error::InvalidConfig("audit interval must be positive".into()));
        }
        Ok(())
    }
}

/// Frequency estimate of the block-1 posterior over the retained samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorEstimate {
    vertices: Vec<usize>,
    counts: Vec<u64>,
    samples: u64,
    accepted: u64,
    steps: u64,
    max_audit_drift: f64,
}

impl PosteriorEstimate {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn probs(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.samples as f64).collect()
    }

    /// Number of retained samples `t`.
    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Raw block-1 hit counts per ambiguous vertex.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.steps as f64
        }
    }

    /// Largest discrepancy seen between the cached and recounted log-likelihood.
    pub fn max_audit_drift(&self) -> f64 {
        self.max_audit_drift
    }
}

/// Outcome of one Metropolis-Hastings step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub u: usize,
    pub v: usize,
    pub log_ratio: f64,
    pub accepted: bool,
}

/// Current assignment plus the bookkeeping needed for O(K) ratio evaluation.
#[derive(Debug, Clone)]
pub struct ChainState {
    k: usize,
    /// 0-indexed label per vertex (seeds included).
    labels: Vec<u8>,
    ambiguous: Vec<usize>,
    /// `nbr[v*k + l]`: neighbors of `v` currently labelled `l`.
    nbr: Vec<u32>,
    log_lik: f64,
    tables: LogTables,
}

impl ChainState {
    /// Starts the chain at `phi`.
    pub fn new(g: &SeededGraph, params: &SbmParams, phi: &BlockAssignment) -> Result<Self> {
        if params.num_blocks() != g.num_blocks() {
            return Err(Error::InvalidParams("block count mismatch".into()));
        }
        if g.num_blocks() > u8::MAX as usize {
            return Err(Error::InvalidParams("at most 255 blocks are supported".into()));
        }
        let tables = LogTables::new(params.bernoulli())?;
        let k = g.num_blocks();
        let n = g.num_vertices();
        let labels: Vec<u8> = phi.labels().iter().map(|&b| (b - 1) as u8).collect();
        let mut nbr = vec![0u32; n * k];
        for v in 0..n {
            for &w in g.graph().neighbors(v) {
                nbr[v * k + labels[w as usize] as usize] += 1;
            }
        }
        let log_lik = block_edge_counts(g, phi).log_likelihood(params.bernoulli());
        let ambiguous = g.ambiguous().to_vec();
        let mut distinct = ambiguous.iter().map(|&v| labels[v]).collect::<Vec<_>>();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(Error::DegenerateStateSpace);
        }
        Ok(Self {
            k,
            labels,
            ambiguous,
            nbr,
            log_lik,
            tables,
        })
    }

    /// Draws `X_0` uniformly from Φ by shuffling the ambiguous label multiset.
    pub fn uniform(g: &SeededGraph, params: &SbmParams, rng: &mut Rng) -> Result<Self> {
        let sizes = g.ambiguous_block_sizes(params.block_sizes())?;
        let mut amb_labels: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &s)| std::iter::repeat_n(i + 1, s))
            .collect();
        amb_labels.shuffle(rng);
        let phi = BlockAssignment::from_ambiguous(g, params.block_sizes(), &amb_labels)?;
        Self::new(g, params, &phi)
    }

    /// 1-indexed block of `v`.
    pub fn label(&self, v: usize) -> usize {
        self.labels[v] as usize + 1
    }

    pub fn assignment(&self) -> BlockAssignment {
        BlockAssignment::from_labels_unchecked(self.labels.iter().map(|&l| l as usize + 1).collect())
    }

    /// Cached `log Π Λ^e (1-Λ)^c` of the current assignment.
    pub fn log_likelihood(&self) -> f64 {
        self.log_lik
    }

    /// Ambiguous-label histogram, 1-indexed blocks at positions `0..K`.
    pub fn ambiguous_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.k];
        for &v in &self.ambiguous {
            h[self.labels[v] as usize] += 1;
        }
        h
    }

    /// Number of cross-block ambiguous pairs, the proposal's support size.
    pub fn proposal_support(&self) -> u64 {
        let a = self.ambiguous.len() as u64;
        let same: u64 = self.ambiguous_histogram().iter().map(|&s| (s as u64) * (s as u64).saturating_sub(1) / 2).sum();
        a * (a - 1) / 2 - same
    }

    /// A uniformly random unordered pair of ambiguous vertices with different
    /// labels, by rejection from all ambiguous pairs. Returned with `u < v`.
    pub fn propose(&self, rng: &mut Rng) -> (usize, usize) {
        let a = self.ambiguous.len();
        loop {
            let i = rng.random_range(0..a);
            let j = rng.random_range(0..a - 1);
            let j = if j >= i { j + 1 } else { j };
            let (u, v) = (self.ambiguous[i], self.ambiguous[j]);
            if self.labels[u] != self.labels[v] {
                return (u.min(v), u.max(v));
            }
        }
    }

    /// `log Q(φ'|G) - log Q(φ|G)` for swapping the labels of `u` and `v`.
    pub fn log_ratio(&self, g: &SeededGraph, u: usize, v: usize) -> f64 {
        let k = self.k;
        let i = self.labels[u] as usize;
        let j = self.labels[v] as usize;
        if i == j {
            return 0.0;
        }
        let logit = &self.tables.logit;
        let cu = &self.nbr[u * k..(u + 1) * k];
        let cv = &self.nbr[v * k..(v + 1) * k];
        let mut r = 0.0;
        for l in 0..k {
            let diff = cu[l] as f64 - cv[l] as f64;
            if diff != 0.0 {
                r += diff * (logit[l * k + j] - logit[l * k + i]);
            }
        }
        if g.graph().has_edge(u, v) {
            // u's count includes v (label j) and v's includes u (label i);
            // the {u, v} pair itself is unchanged by the swap.
            r -= logit[j * k + j] - logit[j * k + i];
            r += logit[i * k + j] - logit[i * k + i];
        }
        r
    }

    /// Swaps the labels of `u` and `v`, updating caches; `log_ratio` is the
    /// precomputed ratio for this swap.
    fn apply_swap(&mut self, g: &SeededGraph, u: usize, v: usize, log_ratio: f64) {
        let k = self.k;
        let i = self.labels[u] as usize;
        let j = self.labels[v] as usize;
        for &w in g.graph().neighbors(u) {
            let base = w as usize * k;
            self.nbr[base + i] -= 1;
            self.nbr[base + j] += 1;
        }
        for &w in g.graph().neighbors(v) {
            let base = w as usize * k;
            self.nbr[base + j] -= 1;
            self.nbr[base + i] += 1;
        }
        self.labels[u] = j as u8;
        self.labels[v] = i as u8;
        self.log_lik += log_ratio;
    }

    /// One Metropolis-Hastings step: propose a swap, accept with probability
    /// `min{1, exp(log_ratio)}`.
    pub fn mh_step(&mut self, g: &SeededGraph, rng: &mut Rng) -> StepOutcome {
        let (u, v) = self.propose(rng);
        let log_ratio = self.log_ratio(g, u, v);
        let accepted = accept(log_ratio, rng);
        if accepted {
            self.apply_swap(g, u, v, log_ratio);
        }
        StepOutcome {
            u,
            v,
            log_ratio,
            accepted,
        }
    }

    /// Recounts the log-likelihood from scratch, resets the cache, and returns
    /// the absolute drift that had accumulated.
    pub fn audit(&mut self, g: &SeededGraph, params: &SbmParams) -> f64 {
        let exact = block_edge_counts(g, &self.assignment()).log_likelihood(params.bernoulli());
        let drift = (exact - self.log_lik).abs();
        self.log_lik = exact;
        drift
    }
}

/// Acceptance rule for a log Metropolis-Hastings ratio.
#[inline]
pub fn accept(log_ratio: f64, rng: &mut Rng) -> bool {
    if log_ratio >= 0.0 {
        true
    } else if log_ratio == f64::NEG_INFINITY || log_ratio.is_nan() {
        false
    } else {
        rng.random::<f64>() < log_ratio.exp()
    }
}

/// Runs the chain from a uniform start, discards the burn-in, and returns the
/// fraction of retained states placing each ambiguous vertex in block 1.
pub fn run_chain(g: &SeededGraph, params: &SbmParams, config: &McmcConfig) -> Result<PosteriorEstimate> {
    config.validate()?;
    let mut rng = rng::seeded(config.rng_seed);
    let mut state = ChainState::uniform(g, params, &mut rng)?;
    let amb = g.ambiguous();
    let mut position = vec![usize::MAX; g.num_vertices()];
    for (i, &v) in amb.iter().enumerate() {
        position[v] = i;
    }
    // Labels only change on accepted swaps, so block-1 time is credited per
    // run of constant label: `since[i]` is the first step of the current run.
    let window = (config.burn_in + 1, config.n_steps);
    let overlap = |from: u64, to: u64| -> u64 {
        let lo = from.max(window.0);
        let hi = to.min(window.1);
        if hi >= lo {
            hi - lo + 1
        } else {
            0
        }
    };
    let mut counts = vec![0u64; amb.len()];
    let mut since = vec![0u64; amb.len()];
    let mut accepted = 0u64;
    let mut max_drift = 0.0f64;
    for step in 1..=config.n_steps {
        let outcome = state.mh_step(g, &mut rng);
        if outcome.accepted {
            accepted += 1;
            for w in [outcome.u, outcome.v] {
                let i = position[w];
                // the partner now carries w's previous label
                let partner = if w == outcome.u { outcome.v } else { outcome.u };
                if state.labels[partner] == 0 {
                    counts[i] += overlap(since[i], step - 1);
                }
                since[i] = step;
            }
        }
        if step % config.audit_interval == 0 {
            max_drift = max_drift.max(state.audit(g, params));
        }
    }
    for (i, &v) in amb.iter().enumerate() {
        if state.labels[v] == 0 {
            counts[i] += overlap(since[i], config.n_steps);
        }
    }
    log::debug!(
        "chain finished: {} steps, acceptance {:.3}",
        config.n_steps,
        accepted as f64 / config.n_steps as f64
    );
    Ok(PosteriorEstimate {
        vertices: amb.to_vec(),
        counts,
        samples: config.retained(),
        accepted,
        steps: config.n_steps,
        max_audit_drift: max_drift,
    })
}

/// Orders ambiguous vertices by nonincreasing estimated posterior, ties by vertex id.
pub fn cs_nominate(estimate: &PosteriorEstimate) -> NominationList {
    NominationList::from_scores(estimate.vertices(), &estimate.probs(), SchemeTag::Lcs)
}
