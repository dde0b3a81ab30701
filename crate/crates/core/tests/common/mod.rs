//! Shared helpers for the integration suites: random instances and a
//! brute-force posterior written independently of the library's enumerator.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng as _;
use vertex_nomination::rng::{self, Rng};
use vertex_nomination::sbm::{designate_seeds, random_membership, sample_graph};
use vertex_nomination::{GroundTruth, SbmParams, SeededGraph};

/// Random symmetric Bernoulli matrix with entries in `[0.05, 0.95]`.
pub fn random_bernoulli(k: usize, rng: &mut Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let p = 0.05 + 0.9 * rng.random::<f64>();
            m[(i, j)] = p;
            m[(j, i)] = p;
        }
    }
    m
}

/// A small random instance: `k` blocks, each with 1..=`max_block` vertices,
/// and a random number of seeds (at least one in block 1).
pub fn random_instance(k: usize, max_block: usize, seed: u64) -> (SeededGraph, SbmParams, GroundTruth) {
    let mut rng = rng::seeded(seed);
    let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(1..=max_block)).collect();
    let seeds: Vec<usize> = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| if i == 0 { rng.random_range(1..=n) } else { rng.random_range(0..=n) })
        .collect();
    let params = SbmParams::new(sizes.clone(), random_bernoulli(k, &mut rng)).unwrap();
    let membership = random_membership(&sizes, &mut rng);
    let graph = sample_graph(&params, &membership, rng.random()).unwrap();
    let (g, truth) = designate_seeds(graph, &membership, &seeds, rng.random()).unwrap();
    (g, params, truth)
}

/// Log-likelihood of a full labelling, summed pair by pair from the adjacency.
pub fn direct_log_likelihood(g: &SeededGraph, params: &SbmParams, labels: &[usize]) -> f64 {
    let n = g.num_vertices();
    let mut total = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            let p = params.bernoulli()[(labels[u] - 1, labels[v] - 1)];
            total += if g.graph().has_edge(u, v) { p.ln() } else { (1.0 - p).ln() };
        }
    }
    total
}

/// Block-1 posterior of every ambiguous vertex (in `g.ambiguous()` order) by
/// scanning all `K^a` labellings and keeping those with the right block sizes.
pub fn brute_force_posterior(g: &SeededGraph, params: &SbmParams) -> Vec<f64> {
    let k = g.num_blocks();
    let amb = g.ambiguous();
    let mut target = params.block_sizes().to_vec();
    for (i, m) in g.seed_counts().into_iter().enumerate() {
        target[i] -= m;
    }
    let mut labels: Vec<usize> = (0..g.num_vertices()).map(|v| g.seed_label(v).unwrap_or(0)).collect();
    let mut weights = Vec::new();
    let mut in_first = Vec::new();
    let total = k.pow(amb.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut counts = vec![0; k];
        for &v in amb {
            labels[v] = c % k + 1;
            counts[c % k] += 1;
            c /= k;
        }
        if counts != target {
            continue;
        }
        weights.push(direct_log_likelihood(g, params, &labels));
        in_first.push(amb.iter().map(|&v| labels[v] == 1).collect::<Vec<_>>());
    }
    let top = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = weights.iter().map(|x| (x - top).exp()).collect();
    let z: f64 = w.iter().sum();
    (0..amb.len())
        .map(|i| w.iter().zip(&in_first).filter(|(_, f)| f[i]).map(|(x, _)| x).sum::<f64>() / z)
        .collect()
}
