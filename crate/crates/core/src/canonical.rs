//! Exact canonical nomination by full enumeration of the constrained
//! assignment space Φ.
//!
//! Every `φ ∈ Φ` is weighted by `Π Λ_ij^{e_ij} (1 - Λ_ij)^{c_ij}`; the posterior
//! block-1 probability of an ambiguous vertex is the weight share of the
//! assignments that put it in block 1. Assignments are visited as multiset
//! permutations of the ambiguous label vector in lexicographic order by a
//! depth-first walk. Each tree node extends per-vertex prefix sums of the
//! log-likelihood, so a leaf costs O(1) beyond the block-1 bookkeeping.
//! Weights are accumulated with a streaming log-sum-exp.
//!
//! When Λ and the block sizes are estimates, they are treated as exact; the
//! resulting posterior is conditional on those estimates.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::likelihood::{LogSumExp, LogTables};
use crate::nomination::{NominationList, SchemeTag};
use crate::sbm::{SbmParams, SeededGraph};

pub const DEFAULT_MAX_ASSIGNMENTS: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalConfig {
    /// Refuse to enumerate when `|Φ|` exceeds this.
    pub max_assignments: f64,
}

impl Default for CanonicalConfig {
    fn default() -> Self {
        Self {
            max_assignments: DEFAULT_MAX_ASSIGNMENTS,
        }
    }
}

/// Posterior probability of block-1 membership for each ambiguous vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorTable {
    vertices: Vec<usize>,
    probs: Vec<f64>,
}

impl PosteriorTable {
    pub fn new(vertices: Vec<usize>, probs: Vec<f64>) -> Self {
        assert_eq!(vertices.len(), probs.len());
        Self { vertices, probs }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, v: usize) -> Option<f64> {
        self.vertices.iter().position(|&u| u == v).map(|i| self.probs[i])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Multinomial coefficient `(Σ s)! / Π s_i!` as a float.
pub fn count_assignments(ambiguous_sizes: &[usize]) -> f64 {
    let mut total = 0usize;
    let mut log_count = 0.0f64;
    for &s in ambiguous_sizes {
        for i in 1..=s {
            total += 1;
            log_count += (total as f64).ln() - (i as f64).ln();
        }
    }
    log_count.exp().round()
}

pub fn enumerate_posterior(g: &SeededGraph, params: &SbmParams) -> Result<PosteriorTable> {
    enumerate_posterior_with(g, params, &CanonicalConfig::default())
}

pub fn enumerate_posterior_with(
    g: &SeededGraph,
    params: &SbmParams,
    config: &CanonicalConfig,
) -> Result<PosteriorTable> {
    if params.num_blocks() != g.num_blocks() {
        return Err(Error::InvalidParams(format!(
            "{}-block parameters for a {}-block graph",
            params.num_blocks(),
            g.num_blocks()
        )));
    }
    let remaining = g.ambiguous_block_sizes(params.block_sizes())?;
    let size = count_assignments(&remaining);
    if size > config.max_assignments {
        return Err(Error::Capacity {
            size,
            limit: config.max_assignments,
        });
    }
    let walker = Walker::new(g, params, remaining)?;
    if walker.a == 0 {
        return Ok(PosteriorTable::new(Vec::new(), Vec::new()));
    }
    // Top-level branches are contiguous lexicographic chunks of Φ; merging in
    // label order keeps the result independent of the thread count.
    let parts: Vec<Accumulator> = (0..walker.k)
        .into_par_iter()
        .filter(|&l| walker.remaining[l] > 0)
        .map(|l| walker.walk_branch(l))
        .collect();
    let mut total = Accumulator::new(walker.a);
    for part in &parts {
        total.merge(part);
    }
    let probs = total.num.iter().map(|&x| x / total.lse.sum).collect();
    Ok(PosteriorTable::new(g.ambiguous().to_vec(), probs))
}

/// Orders the ambiguous vertices by nonincreasing posterior, ties by vertex id.
pub fn canonical_nominate(posterior: &PosteriorTable) -> NominationList {
    NominationList::from_scores(posterior.vertices(), posterior.probs(), SchemeTag::Lc)
}

#[derive(Debug, Clone)]
struct Accumulator {
    lse: LogSumExp,
    /// Per ambiguous position, the block-1 weight scaled by `exp(-lse.max)`.
    num: Vec<f64>,
}

impl Accumulator {
    fn new(a: usize) -> Self {
        Self {
            lse: LogSumExp::default(),
            num: vec![0.0; a],
        }
    }

    #[inline]
    fn rescale_to(&mut self, new_max: f64) {
        if self.lse.max == f64::NEG_INFINITY {
            self.lse.max = new_max;
            return;
        }
        let s = (self.lse.max - new_max).exp();
        self.lse.sum *= s;
        for x in &mut self.num {
            *x *= s;
        }
        self.lse.max = new_max;
    }

    #[inline]
    fn add_leaf(&mut self, log_w: f64, block_one: &[usize]) {
        if log_w > self.lse.max {
            self.rescale_to(log_w);
        }
        let w = (log_w - self.lse.max).exp();
        self.lse.sum += w;
        for &t in block_one {
            self.num[t] += w;
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        if other.lse.max == f64::NEG_INFINITY {
            return;
        }
        if other.lse.max > self.lse.max {
            self.rescale_to(other.lse.max);
        }
        let s = (other.lse.max - self.lse.max).exp();
        self.lse.sum += other.lse.sum * s;
        for (x, y) in self.num.iter_mut().zip(&other.num) {
            *x += y * s;
        }
    }
}

struct Walker {
    a: usize,
    k: usize,
    remaining: Vec<usize>,
    /// `base[t*k + l]`: log-likelihood of ambiguous vertex `t` with label `l`
    /// against all seeds.
    base: Vec<f64>,
    /// `delta[(t*k + l) * a*k + t'*k + l']`: pair term between ambiguous `t`
    /// labelled `l` and ambiguous `t'` labelled `l'`.
    delta: Vec<f64>,
}

impl Walker {
    fn new(g: &SeededGraph, params: &SbmParams, remaining: Vec<usize>) -> Result<Self> {
        let tables = LogTables::new(params.bernoulli())?;
        let k = g.num_blocks();
        let amb = g.ambiguous();
        let a = amb.len();
        let graph = g.graph();

        let seed_totals = g.seed_counts();
        let mut base = vec![0.0; a * k];
        let mut adj_seeds = vec![0usize; k];
        for (t, &v) in amb.iter().enumerate() {
            adj_seeds.iter_mut().for_each(|c| *c = 0);
            for &w in graph.neighbors(v) {
                if let Some(b) = g.seed_label(w as usize) {
                    adj_seeds[b - 1] += 1;
                }
            }
            for l in 0..k {
                base[t * k + l] = (0..k)
                    .map(|j| {
                        adj_seeds[j] as f64 * tables.log_p[l * k + j]
                            + (seed_totals[j] - adj_seeds[j]) as f64 * tables.log_q[l * k + j]
                    })
                    .sum();
            }
        }

        let stride = a * k;
        let mut delta = vec![0.0; a * k * stride];
        for t in 0..a {
            for t2 in (t + 1)..a {
                let adjacent = graph.has_edge(amb[t], amb[t2]);
                for l in 0..k {
                    for l2 in 0..k {
                        delta[(t * k + l) * stride + t2 * k + l2] = tables.term(l, l2, adjacent);
                    }
                }
            }
        }
        Ok(Self {
            a,
            k,
            remaining,
            base,
            delta,
        })
    }

    fn walk_branch(&self, first: usize) -> Accumulator {
        let mut state = WalkState {
            remaining: self.remaining.clone(),
            partial: vec![0.0; (self.a + 1) * self.a * self.k],
            block_one: Vec::with_capacity(self.a),
            acc: Accumulator::new(self.a),
        };
        state.partial[..self.a * self.k].copy_from_slice(&self.base);
        self.descend(&mut state, 0, 0.0, first);
        state.acc
    }

    /// Assigns `label` to ambiguous position `t` and explores the subtree.
    fn descend(&self, st: &mut WalkState, t: usize, acc: f64, label: usize) {
        let (a, k) = (self.a, self.k);
        let stride = a * k;
        let log_w = acc + st.partial[t * stride + t * k + label];
        st.remaining[label] -= 1;
        if label == 0 {
            st.block_one.push(t);
        }
        if t + 1 == a {
            st.acc.add_leaf(log_w, &st.block_one);
        } else {
            let (head, tail) = st.partial.split_at_mut((t + 1) * stride);
            let cur = &head[t * stride..];
            let next = &mut tail[..stride];
            let from = (t + 1) * k;
            let row = &self.delta[(t * k + label) * stride..(t * k + label + 1) * stride];
            for ((n, c), d) in next[from..].iter_mut().zip(&cur[from..]).zip(&row[from..]) {
                *n = c + d;
            }
            for l in 0..k {
                if st.remaining[l] > 0 {
                    self.descend(st, t + 1, log_w, l);
                }
            }
        }
        if label == 0 {
            st.block_one.pop();
        }
        st.remaining[label] += 1;
    }
}

struct WalkState {
    remaining: Vec<usize>,
    /// Row `t` holds, for positions `>= t`, the log-likelihood of each label
    /// against seeds and positions `< t`.
    partial: Vec<f64>,
    block_one: Vec<usize>,
    acc: Accumulator,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use nalgebra::DMatrix;

    #[test]
    fn assignment_counts() {
        assert_eq!(count_assignments(&[4, 3, 3]), 4200.0);
        assert_eq!(count_assignments(&[7, 4, 4]), 450_450.0);
        assert_eq!(count_assignments(&[8, 5, 4]), 3_063_060.0);
        assert_eq!(count_assignments(&[2, 2]), 6.0);
        assert_eq!(count_assignments(&[]), 1.0);
    }

    #[test]
    fn erdos_renyi_posterior_is_uniform() {
        let edges = [(0, 3), (1, 4), (2, 5), (3, 6), (4, 7), (0, 7), (2, 6)];
        let g = Graph::from_edges(9, &edges).unwrap();
        let sg = SeededGraph::new(g, 3, &[(0, 1), (1, 2)]).unwrap();
        let params = SbmParams::new(vec![3, 3, 3], DMatrix::from_element(3, 3, 0.37)).unwrap();
        let post = enumerate_posterior(&sg, &params).unwrap();
        for &q in post.probs() {
            assert!((q - 2.0 / 7.0).abs() < 1e-12, "{q}");
        }
    }

    #[test]
    fn two_element_space_sums_to_one() {
        let g = Graph::from_edges(4, &[(0, 2), (1, 3), (2, 3)]).unwrap();
        let sg = SeededGraph::new(g, 2, &[(0, 1), (1, 2)]).unwrap();
        let params = SbmParams::new(vec![2, 2], DMatrix::from_row_slice(2, 2, &[0.8, 0.1, 0.1, 0.6])).unwrap();
        let post = enumerate_posterior(&sg, &params).unwrap();
        assert_eq!(post.vertices(), &[2, 3]);
        assert!((post.total() - 1.0).abs() < 1e-12);
        // vertex 2 is adjacent to seed 0 (block 1): it should lean to block 1
        assert!(post.get(2).unwrap() > 0.5);
    }

    #[test]
    fn capacity_guard() {
        let sg = SeededGraph::new(Graph::empty(12), 3, &[(0, 1), (1, 1), (2, 1), (3, 1)]).unwrap();
        let params = SbmParams::new(vec![8, 2, 2], DMatrix::from_element(3, 3, 0.5)).unwrap();
        let config = CanonicalConfig { max_assignments: 100.0 };
        let err = enumerate_posterior_with(&sg, &params, &config).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        assert!(err.to_string().contains("lcs"));
    }

    #[test]
    fn all_seed_graph_gives_empty_table() {
        let sg = SeededGraph::new(Graph::complete(2), 2, &[(0, 1), (1, 2)]).unwrap();
        let params = SbmParams::new(vec![1, 1], DMatrix::from_element(2, 2, 0.5)).unwrap();
        let post = enumerate_posterior(&sg, &params).unwrap();
        assert!(post.probs().is_empty());
        assert!(canonical_nominate(&post).is_empty());
    }
}
