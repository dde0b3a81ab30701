//! Stochastic block models: parameters, sampling, seeding and seed-based
//! parameter estimation.
//!
//! Vertices are 0-indexed. Blocks are 1-indexed everywhere in the public API
//! (block `1` is the block of interest); the Bernoulli matrix itself is a plain
//! 0-indexed `DMatrix`, so block pair `(i, j)` lives at `bernoulli[(i - 1, j - 1)]`.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Generative parameters `(K, n, Λ)` of a stochastic block model.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmParams {
    block_sizes: Vec<usize>,
    bernoulli: DMatrix<f64>,
}

impl SbmParams {
    /// Validates symmetry, the open-interval constraint on Λ, and block sizes.
    pub fn new(block_sizes: Vec<usize>, bernoulli: DMatrix<f64>) -> Result<Self> {
        let k = block_sizes.len();
        if k == 0 {
            return Err(Error::InvalidParams("at least one block is required".into()));
        }
        if bernoulli.nrows() != k || bernoulli.ncols() != k {
            return Err(Error::InvalidParams(format!(
                "bernoulli matrix is {}x{} but there are {k} blocks",
                bernoulli.nrows(),
                bernoulli.ncols()
            )));
        }
        if let Some(i) = block_sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidParams(format!("block {} is empty", i + 1)));
        }
        validate_probabilities(&bernoulli)?;
        Ok(Self {
            block_sizes,
            bernoulli,
        })
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_vertices(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn bernoulli(&self) -> &DMatrix<f64> {
        &self.bernoulli
    }

    /// Edge probability between 1-indexed blocks `i` and `j`.
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.bernoulli[(i - 1, j - 1)]
    }

    /// Same Λ, different block sizes.
    pub fn with_block_sizes(&self, block_sizes: Vec<usize>) -> Result<Self> {
        Self::new(block_sizes, self.bernoulli.clone())
    }
}

/// Checks that `m` is square, symmetric and strictly inside (0, 1).
pub fn validate_probabilities(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidParams("bernoulli matrix must be square".into()));
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let p = m[(i, j)];
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::ProbabilityOutOfRange {
                    i: i + 1,
                    j: j + 1,
                    value: p,
                });
            }
            if m[(i, j)] != m[(j, i)] {
                return Err(Error::InvalidParams(format!(
                    "bernoulli matrix is not symmetric at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Full block membership `b: V -> {1..K}`. Evaluation-only: nomination
/// schemes never receive it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    labels: Vec<usize>,
}

impl GroundTruth {
    pub fn new(labels: Vec<usize>) -> Self {
        Self { labels }
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn in_interest_block(&self, v: usize) -> bool {
        self.labels[v] == 1
    }
}

/// Membership vector with `block_sizes[i]` vertices in block `i + 1`,
/// placed in uniformly random vertex positions.
pub fn random_membership<R: rand::Rng + ?Sized>(block_sizes: &[usize], rng: &mut R) -> Vec<usize> {
    let mut labels: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| std::iter::repeat_n(i + 1, s))
        .collect();
    labels.shuffle(rng);
    labels
}

/// Membership with blocks laid out contiguously: vertices `0..n_1` in block 1, and so on.
pub fn contiguous_membership(block_sizes: &[usize]) -> Vec<usize> {
    block_sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| std::iter::repeat_n(i + 1, s))
        .collect()
}

fn check_membership(block_sizes: &[usize], membership: &[usize]) -> Result<()> {
    let k = block_sizes.len();
    let mut counts = vec![0usize; k];
    for &b in membership {
        if b == 0 || b > k {
            return Err(Error::InvalidAssignment(format!("label {b} outside 1..={k}")));
        }
        counts[b - 1] += 1;
    }
    for (i, (&c, &s)) in counts.iter().zip(block_sizes).enumerate() {
        if c != s {
            return Err(Error::BlockSizeMismatch {
                block: i + 1,
                expected: s,
                actual: c,
            });
        }
    }
    Ok(())
}

/// Draws a graph: every unordered pair `{u, v}` is an edge independently with
/// probability `Λ[b(u)][b(v)]`.
pub fn sample_graph(params: &SbmParams, membership: &[usize], rng_seed: u64) -> Result<Graph> {
    check_membership(&params.block_sizes, membership)?;
    let n = membership.len();
    let k = params.num_blocks();
    let mut rng = rng::seeded(rng_seed);
    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut row = vec![0.0; k];
    for u in 0..n {
        let bu = membership[u] - 1;
        for (j, p) in row.iter_mut().enumerate() {
            *p = params.bernoulli[(bu, j)];
        }
        for v in (u + 1)..n {
            if rng.random::<f64>() < row[membership[v] - 1] {
                lists[u].push(v as u32);
                lists[v].push(u as u32);
            }
        }
    }
    // Lower neighbors were appended in increasing u order, upper ones after,
    // so each list is already sorted.
    Ok(Graph::from_sorted_lists(lists))
}

/// A graph whose seed vertices carry observed block labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SeededGraph {
    graph: Graph,
    num_blocks: usize,
    seed_labels: Vec<Option<usize>>,
    seeds: Vec<usize>,
    ambiguous: Vec<usize>,
}

impl SeededGraph {
    /// `seed_labels` maps seed vertices to 1-indexed blocks.
    pub fn new(graph: Graph, num_blocks: usize, seed_labels: &[(usize, usize)]) -> Result<Self> {
        let n = graph.num_vertices();
        if num_blocks == 0 {
            return Err(Error::InvalidParams("at least one block is required".into()));
        }
        let mut labels = vec![None; n];
        for &(v, b) in seed_labels {
            if v >= n {
                return Err(Error::InvalidGraph(format!("seed vertex {v} outside 0..{n}")));
            }
            if b == 0 || b > num_blocks {
                return Err(Error::InvalidAssignment(format!(
                    "seed {v} has label {b} outside 1..={num_blocks}"
                )));
            }
            if labels[v].is_some_and(|old| old != b) {
                return Err(Error::InvalidAssignment(format!("seed {v} labelled twice")));
            }
            labels[v] = Some(b);
        }
        let seeds = (0..n).filter(|&v| labels[v].is_some()).collect();
        let ambiguous = (0..n).filter(|&v| labels[v].is_none()).collect();
        Ok(Self {
            graph,
            num_blocks,
            seed_labels: labels,
            seeds,
            ambiguous,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn seed_label(&self, v: usize) -> Option<usize> {
        self.seed_labels[v]
    }

    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    pub fn ambiguous(&self) -> &[usize] {
        &self.ambiguous
    }

    /// `m_i` for each block.
    pub fn seed_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_blocks];
        for &v in &self.seeds {
            counts[self.seed_labels[v].unwrap() - 1] += 1;
        }
        counts
    }

    /// Seed vertices of 1-indexed block `b`.
    pub fn seeds_in_block(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        self.seeds.iter().copied().filter(move |&v| self.seed_labels[v] == Some(b))
    }

    /// Seed `(vertex, label)` pairs in ascending vertex order.
    pub fn seed_pairs(&self) -> Vec<(usize, usize)> {
        self.seeds.iter().map(|&v| (v, self.seed_labels[v].unwrap())).collect()
    }

    /// Ambiguous block sizes `n_i - m_i` implied by `block_sizes`.
    pub fn ambiguous_block_sizes(&self, block_sizes: &[usize]) -> Result<Vec<usize>> {
        if block_sizes.len() != self.num_blocks {
            return Err(Error::InvalidParams(format!(
                "{} block sizes for a {}-block graph",
                block_sizes.len(),
                self.num_blocks
            )));
        }
        if block_sizes.iter().sum::<usize>() != self.num_vertices() {
            return Err(Error::InvalidParams(format!(
                "block sizes sum to {} but the graph has {} vertices",
                block_sizes.iter().sum::<usize>(),
                self.num_vertices()
            )));
        }
        let m = self.seed_counts();
        block_sizes
            .iter()
            .zip(&m)
            .enumerate()
            .map(|(i, (&n_i, &m_i))| {
                n_i.checked_sub(m_i).ok_or(Error::TooManySeeds {
                    block: i + 1,
                    requested: m_i,
                    available: n_i,
                })
            })
            .collect()
    }

    /// Applies a vertex relabelling `v -> perm[v]` to graph and seeds.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let pairs: Vec<_> = self.seed_pairs().into_iter().map(|(v, b)| (perm[v], b)).collect();
        Self::new(self.graph.permuted(perm), self.num_blocks, &pairs)
            .expect("permutation preserves validity")
    }
}

/// Picks `seed_counts[i]` seeds uniformly from block `i + 1`; everything else is ambiguous.
pub fn designate_seeds(
    graph: Graph,
    membership: &[usize],
    seed_counts: &[usize],
    rng_seed: u64,
) -> Result<(SeededGraph, GroundTruth)> {
    let k = seed_counts.len();
    if membership.len() != graph.num_vertices() {
        return Err(Error::InvalidAssignment(format!(
            "membership has {} entries for {} vertices",
            membership.len(),
            graph.num_vertices()
        )));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, &b) in membership.iter().enumerate() {
        if b == 0 || b > k {
            return Err(Error::InvalidAssignment(format!("label {b} outside 1..={k}")));
        }
        members[b - 1].push(v);
    }
    let mut rng = rng::seeded(rng_seed);
    let mut pairs = Vec::new();
    for (i, (pool, &want)) in members.iter_mut().zip(seed_counts).enumerate() {
        if want > pool.len() {
            return Err(Error::TooManySeeds {
                block: i + 1,
                requested: want,
                available: pool.len(),
            });
        }
        let (chosen, _) = pool.partial_shuffle(&mut rng, want);
        pairs.extend(chosen.iter().map(|&v| (v, i + 1)));
    }
    pairs.sort_unstable();
    let seeded = SeededGraph::new(graph, k, &pairs)?;
    Ok((seeded, GroundTruth::new(membership.to_vec())))
}

/// Seed-subgraph estimate of Λ: edge density between (or within) seed blocks.
pub fn estimate_bernoulli(g: &SeededGraph) -> Result<DMatrix<f64>> {
    let k = g.num_blocks();
    let m = g.seed_counts();
    let mut edges = DMatrix::<f64>::zeros(k, k);
    for &u in g.seeds() {
        let bu = g.seed_label(u).unwrap() - 1;
        for &v in g.graph().neighbors(u) {
            let v = v as usize;
            if v > u {
                if let Some(bv) = g.seed_label(v) {
                    let (i, j) = (bu.min(bv - 1), bu.max(bv - 1));
                    edges[(i, j)] += 1.0;
                }
            }
        }
    }
    let mut est = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let denom = if i == j {
                (m[i] * m[i].saturating_sub(1) / 2) as f64
            } else {
                (m[i] * m[j]) as f64
            };
            if denom == 0.0 {
                return Err(Error::UnestimableEntry { i: i + 1, j: j + 1 });
            }
            est[(i, j)] = edges[(i, j)] / denom;
            est[(j, i)] = est[(i, j)];
        }
    }
    Ok(est)
}

/// Block sizes estimated from seed proportions `m_i n / m`, repaired so they
/// sum to `n` and every block holds at least `max(m_i, 1)` vertices.
pub fn estimate_block_sizes(g: &SeededGraph) -> Result<Vec<usize>> {
    let m = g.seed_counts();
    let total_seeds: usize = m.iter().sum();
    if total_seeds == 0 {
        return Err(Error::NoSeeds);
    }
    let n = g.num_vertices();
    let k = m.len();
    if n < k {
        return Err(Error::InvalidParams(format!("{n} vertices cannot fill {k} blocks")));
    }
    let raw: Vec<f64> = m.iter().map(|&mi| mi as f64 * n as f64 / total_seeds as f64).collect();
    let mut est: Vec<usize> = raw.iter().map(|x| x.floor() as usize).collect();
    let mut remainder = n - est.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..k).collect();
    // Largest fractional part first; ties to the lower block index.
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if remainder == 0 {
            break;
        }
        est[i] += 1;
        remainder -= 1;
    }
    let floor: Vec<usize> = m.iter().map(|&mi| mi.max(1)).collect();
    for i in 0..k {
        while est[i] < floor[i] {
            let donor = (0..k)
                .filter(|&j| j != i && est[j] > floor[j])
                .max_by(|&a, &b| est[a].cmp(&est[b]).then(b.cmp(&a)))
                .ok_or_else(|| Error::InvalidParams("no block can donate a vertex".into()))?;
            est[donor] -= 1;
            est[i] += 1;
        }
    }
    Ok(est)
}

/// A member of Φ: labels every vertex, agrees with the seeds, and respects block sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAssignment {
    labels: Vec<usize>,
}

impl BlockAssignment {
    pub fn new(g: &SeededGraph, block_sizes: &[usize], labels: Vec<usize>) -> Result<Self> {
        if labels.len() != g.num_vertices() {
            return Err(Error::InvalidAssignment(format!(
                "{} labels for {} vertices",
                labels.len(),
                g.num_vertices()
            )));
        }
        for &s in g.seeds() {
            if Some(labels[s]) != g.seed_label(s) {
                return Err(Error::InvalidAssignment(format!("seed {s} relabelled")));
            }
        }
        check_membership(block_sizes, &labels)?;
        Ok(Self { labels })
    }

    /// Builds an assignment from the ambiguous labels listed in `g.ambiguous()` order.
    pub fn from_ambiguous(g: &SeededGraph, block_sizes: &[usize], ambiguous_labels: &[usize]) -> Result<Self> {
        let mut labels = vec![0; g.num_vertices()];
        for &s in g.seeds() {
            labels[s] = g.seed_label(s).unwrap();
        }
        if ambiguous_labels.len() != g.ambiguous().len() {
            return Err(Error::InvalidAssignment("wrong number of ambiguous labels".into()));
        }
        for (&v, &b) in g.ambiguous().iter().zip(ambiguous_labels) {
            labels[v] = b;
        }
        Self::new(g, block_sizes, labels)
    }

    pub(crate) fn from_labels_unchecked(labels: Vec<usize>) -> Self {
        Self { labels }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }
}

/// Per block pair edge counts `e[i][j]` and non-edge counts `c[i][j]`, `i <= j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEdgeCounts {
    k: usize,
    edges: Vec<u64>,
    non_edges: Vec<u64>,
}

impl BlockEdgeCounts {
    fn idx(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        (a - 1) * self.k + (b - 1)
    }

    pub fn num_blocks(&self) -> usize {
        self.k
    }

    /// Edges with endpoint labels `{i, j}` (1-indexed, symmetric).
    pub fn edges(&self, i: usize, j: usize) -> u64 {
        self.edges[self.idx(i, j)]
    }

    pub fn non_edges(&self, i: usize, j: usize) -> u64 {
        self.non_edges[self.idx(i, j)]
    }

    /// `Σ_{i<=j} e_ij log Λ_ij + c_ij log(1 - Λ_ij)`, the log of the
    /// likelihood term of the assignment.
    pub fn log_likelihood(&self, bernoulli: &DMatrix<f64>) -> f64 {
        let mut total = 0.0;
        for i in 1..=self.k {
            for j in i..=self.k {
                let p = bernoulli[(i - 1, j - 1)];
                total += self.edges(i, j) as f64 * p.ln() + self.non_edges(i, j) as f64 * (-p).ln_1p();
            }
        }
        total
    }
}

pub fn block_edge_counts(g: &SeededGraph, phi: &BlockAssignment) -> BlockEdgeCounts {
    let k = g.num_blocks();
    let mut sizes = vec![0u64; k];
    for &b in phi.labels() {
        sizes[b - 1] += 1;
    }
    let mut counts = BlockEdgeCounts {
        k,
        edges: vec![0; k * k],
        non_edges: vec![0; k * k],
    };
    for (u, v) in g.graph().edges() {
        let idx = counts.idx(phi.label(u), phi.label(v));
        counts.edges[idx] += 1;
    }
    for i in 1..=k {
        for j in i..=k {
            let pairs = if i == j {
                sizes[i - 1] * sizes[i - 1].saturating_sub(1) / 2
            } else {
                sizes[i - 1] * sizes[j - 1]
            };
            let idx = counts.idx(i, j);
            counts.non_edges[idx] = pairs - counts.edges[idx];
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_block(p: f64, q: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[p, q, q, p])
    }

    #[test]
    fn params_validation() {
        assert!(SbmParams::new(vec![2, 2], two_block(0.5, 0.2)).is_ok());
        assert!(matches!(
            SbmParams::new(vec![2, 2], two_block(1.0, 0.2)),
            Err(Error::ProbabilityOutOfRange { .. })
        ));
        assert!(SbmParams::new(vec![2, 0], two_block(0.5, 0.2)).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.2, 0.5]);
        assert!(SbmParams::new(vec![2, 2], asym).is_err());
        assert!(SbmParams::new(vec![2, 2, 2], two_block(0.5, 0.2)).is_err());
    }

    #[test]
    fn sample_graph_rejects_size_mismatch() {
        let params = SbmParams::new(vec![2, 2], two_block(0.5, 0.2)).unwrap();
        let err = sample_graph(&params, &[1, 1, 1, 2], 0).unwrap_err();
        assert!(matches!(err, Error::BlockSizeMismatch { block: 1, .. }));
    }

    #[test]
    fn near_degenerate_bernoulli_gives_complete_or_empty_graph() {
        let dense = SbmParams::new(vec![5, 5], two_block(1.0 - 1e-15, 1.0 - 1e-15)).unwrap();
        let b = contiguous_membership(&[5, 5]);
        assert_eq!(sample_graph(&dense, &b, 3).unwrap().num_edges(), 45);
        let sparse = SbmParams::new(vec![5, 5], two_block(1e-15, 1e-15)).unwrap();
        assert_eq!(sample_graph(&sparse, &b, 3).unwrap().num_edges(), 0);
    }

    #[test]
    fn sampling_is_reproducible() {
        let params = SbmParams::new(vec![10, 10], two_block(0.5, 0.2)).unwrap();
        let b = contiguous_membership(&[10, 10]);
        assert_eq!(sample_graph(&params, &b, 9).unwrap(), sample_graph(&params, &b, 9).unwrap());
        assert_ne!(sample_graph(&params, &b, 9).unwrap(), sample_graph(&params, &b, 10).unwrap());
    }

    #[test]
    fn edge_frequencies_match_bernoulli() {
        let params = SbmParams::new(vec![3, 3], two_block(0.9, 0.1)).unwrap();
        let b = contiguous_membership(&[3, 3]);
        let draws = 50_000;
        let mut hits = [[0u32; 6]; 6];
        for s in 0..draws {
            let g = sample_graph(&params, &b, s).unwrap();
            for (u, v) in g.edges() {
                hits[u][v] += 1;
            }
        }
        for u in 0..6 {
            for v in (u + 1)..6 {
                let freq = hits[u][v] as f64 / draws as f64;
                let expected = params.prob(b[u], b[v]);
                assert!((freq - expected).abs() < 0.01, "({u},{v}) freq {freq} vs {expected}");
            }
        }
    }

    #[test]
    fn seed_designation_counts() {
        let params = SbmParams::new(vec![8, 3, 3], DMatrix::from_element(3, 3, 0.5)).unwrap();
        let b = contiguous_membership(params.block_sizes());
        let g = sample_graph(&params, &b, 1).unwrap();
        let (sg, truth) = designate_seeds(g.clone(), &b, &[4, 0, 0], 2).unwrap();
        assert_eq!(sg.ambiguous().len(), 10);
        assert_eq!(sg.seed_counts(), vec![4, 0, 0]);
        assert!(sg.seeds().iter().all(|&s| truth.label(s) == 1));

        let (all, _) = designate_seeds(g.clone(), &b, &[8, 3, 3], 2).unwrap();
        assert!(all.ambiguous().is_empty());

        assert!(matches!(
            designate_seeds(g, &b, &[9, 0, 0], 2),
            Err(Error::TooManySeeds { block: 1, .. })
        ));
    }

    #[test]
    fn medium_scale_seed_split() {
        let n = [220usize, 150, 150];
        let b = contiguous_membership(&n);
        let g = Graph::empty(520);
        let (sg, _) = designate_seeds(g, &b, &[20, 0, 0], 0).unwrap();
        assert_eq!(sg.ambiguous().len(), 500);
    }

    #[test]
    fn bernoulli_estimate_on_complete_seed_graph() {
        let g = Graph::complete(6);
        let sg = SeededGraph::new(g, 2, &[(0, 1), (1, 1), (2, 2), (3, 2)]).unwrap();
        let est = estimate_bernoulli(&sg).unwrap();
        assert!(est.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn bernoulli_estimate_direct_ratio() {
        // S_1 = {0, 1}, S_2 = {2, 3, 4}; three cross edges, one inside S_2.
        let g = Graph::from_edges(5, &[(0, 2), (0, 3), (1, 4), (2, 3)]).unwrap();
        let sg = SeededGraph::new(g, 2, &[(0, 1), (1, 1), (2, 2), (3, 2), (4, 2)]).unwrap();
        let est = estimate_bernoulli(&sg).unwrap();
        assert_eq!(est[(0, 1)], 0.5);
        assert_eq!(est[(1, 0)], 0.5);
        assert_eq!(est[(0, 0)], 0.0);
        assert!((est[(1, 1)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_estimate_names_unestimable_pair() {
        let g = Graph::complete(4);
        let sg = SeededGraph::new(g, 2, &[(0, 1), (1, 1), (2, 2)]).unwrap();
        assert!(matches!(estimate_bernoulli(&sg), Err(Error::UnestimableEntry { i: 2, j: 2 })));
        let sg = SeededGraph::new(Graph::complete(4), 2, &[(0, 1), (1, 1)]).unwrap();
        assert!(matches!(estimate_bernoulli(&sg), Err(Error::UnestimableEntry { i: 1, j: 2 })));
    }

    #[test]
    fn block_size_estimates() {
        // exact proportionality
        let sg = SeededGraph::new(Graph::empty(9), 2, &[(0, 1), (1, 1), (2, 2)]).unwrap();
        assert_eq!(estimate_block_sizes(&sg).unwrap(), vec![6, 3]);
        // zero-seed blocks get repaired
        let sg = SeededGraph::new(Graph::empty(14), 3, &[(0, 1), (1, 1), (2, 1), (3, 1)]).unwrap();
        let est = estimate_block_sizes(&sg).unwrap();
        assert_eq!(est, vec![12, 1, 1]);
        // fractional remainder goes to the largest fractional part
        let sg = SeededGraph::new(Graph::empty(10), 3, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let est = estimate_block_sizes(&sg).unwrap();
        assert_eq!(est.iter().sum::<usize>(), 10);
        assert_eq!(est, vec![4, 3, 3]);
        let sg = SeededGraph::new(Graph::empty(5), 2, &[]).unwrap();
        assert!(matches!(estimate_block_sizes(&sg), Err(Error::NoSeeds)));
    }

    #[test]
    fn edge_counts_hand_cases() {
        let sg = SeededGraph::new(Graph::from_edges(4, &[(0, 2)]).unwrap(), 2, &[]).unwrap();
        let phi = BlockAssignment::new(&sg, &[2, 2], vec![1, 1, 2, 2]).unwrap();
        let c = block_edge_counts(&sg, &phi);
        assert_eq!(c.edges(1, 2), 1);
        assert_eq!(c.edges(2, 1), 1);
        assert_eq!(c.non_edges(1, 2), 3);
        assert_eq!(c.edges(1, 1), 0);
        assert_eq!(c.edges(2, 2), 0);
        assert_eq!(c.non_edges(1, 1), 1);

        let empty = SeededGraph::new(Graph::empty(5), 2, &[]).unwrap();
        let phi = BlockAssignment::new(&empty, &[3, 2], vec![1, 2, 1, 2, 1]).unwrap();
        let c = block_edge_counts(&empty, &phi);
        assert_eq!((c.non_edges(1, 1), c.non_edges(1, 2), c.non_edges(2, 2)), (3, 6, 1));

        let full = SeededGraph::new(Graph::complete(5), 2, &[]).unwrap();
        let c = block_edge_counts(&full, &phi);
        assert_eq!((c.non_edges(1, 1), c.non_edges(1, 2), c.non_edges(2, 2)), (0, 0, 0));
    }

    #[test]
    fn assignment_validation() {
        let sg = SeededGraph::new(Graph::empty(4), 2, &[(0, 1)]).unwrap();
        assert!(BlockAssignment::new(&sg, &[2, 2], vec![2, 1, 1, 2]).is_err());
        assert!(BlockAssignment::new(&sg, &[2, 2], vec![1, 1, 1, 2]).is_err());
        assert!(BlockAssignment::new(&sg, &[2, 2], vec![1, 2, 1, 2]).is_ok());
    }
}
