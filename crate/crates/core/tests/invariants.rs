//! Property-based invariants across the pipeline.

mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use vertex_nomination::embed::{adjacency_spectral_embed_with, top_eigenpairs, EmbedConfig, Solver};
use vertex_nomination::eval::average_precision;
use vertex_nomination::gmm::{em_fit, ss_kmeanspp_init, CovarianceModel, EmConfig, Supervision};
use vertex_nomination::kmeans::kmeans;
use vertex_nomination::nominate::{nominate_lc, nominate_lep, nominate_lp, nominate_random, LepConfig, LpConfig};
use vertex_nomination::points::Points;
use vertex_nomination::{rng, Graph, GroundTruth, NominationList, SchemeTag};

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    use rand::Rng as _;
    let mut r = rng::seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn average_precision_is_bounded(labels in prop::collection::vec(1usize..=3, 2..40), seed in any::<u64>()) {
        prop_assume!(labels.contains(&1));
        let truth = GroundTruth::new(labels.clone());
        let order: Vec<usize> = (0..labels.len()).collect();
        let n = order.len();
        let mut shuffled = order.clone();
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng::seeded(seed));
        let list = NominationList::from_ordered(shuffled, (0..n).map(|i| (n - i) as f64).collect(), SchemeTag::Random).unwrap();
        let ap = average_precision(&list, &truth).unwrap();
        prop_assert!((0.0..=1.0).contains(&ap));
        // interest vertices first is perfect
        let mut best = order.clone();
        best.sort_by_key(|&v| labels[v] != 1);
        let perfect = NominationList::from_ordered(best, (0..n).map(|i| (n - i) as f64).collect(), SchemeTag::Random).unwrap();
        prop_assert_eq!(average_precision(&perfect, &truth).unwrap(), 1.0);
    }

    #[test]
    fn responsibilities_are_stochastic(
        rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 12..60),
        k in 1usize..4,
        seed in any::<u64>(),
    ) {
        let pts = Points::from_rows(&rows);
        let mut sup = vec![Supervision::Free; rows.len()];
        sup[0] = Supervision::Known(0);
        let init = ss_kmeanspp_init(&pts, &sup, k, &mut rng::seeded(seed)).unwrap();
        for model in [CovarianceModel::Eii, CovarianceModel::Vvi, CovarianceModel::Eee] {
            // degenerate draws may legitimately fail; successful fits must be well formed
            if let Ok(m) = em_fit(&pts, &sup, k, model, None, &init, &EmConfig::default()) {
                for r in 0..m.unsupervised().len() {
                    let row = m.responsibility_row(r);
                    prop_assert!(row.iter().all(|&x| (0.0..=1.0).contains(&x)));
                    prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
                prop_assert!((m.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert_eq!(m.monotonicity_violations(), 0);
            }
        }
    }

    #[test]
    fn embedding_basis_is_orthonormal(n in 12usize..90, p in 0.1f64..0.6, dim in 1usize..5, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        prop_assume!(g.num_edges() > 0);
        for solver in [Solver::Dense, Solver::Lanczos] {
            let cfg = EmbedConfig { solver, ..EmbedConfig::default() };
            let (values, vectors) = top_eigenpairs(&g, dim, &cfg).unwrap();
            let gram = vectors.transpose() * &vectors;
            prop_assert!((gram - DMatrix::identity(dim, dim)).abs().max() < 1e-8);
            // eigen-residual against the explicit adjacency matrix
            let mut a = DMatrix::<f64>::zeros(n, n);
            for (u, v) in g.edges() {
                a[(u, v)] = 1.0;
                a[(v, u)] = 1.0;
            }
            for j in 0..dim {
                let x = vectors.column(j);
                let resid = &a * x - x * values[j];
                prop_assert!(resid.norm() < 1e-6 * values[0].abs().max(1.0));
            }
            // magnitudes are sorted
            prop_assert!(values.windows(2).all(|w| w[0].abs() >= w[1].abs() - 1e-9));
            let emb = adjacency_spectral_embed_with(&g, dim, &cfg).unwrap();
            prop_assert_eq!(emb.coords().nrows(), n);
        }
    }

    #[test]
    fn kmeans_partitions_every_point(rows in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 5..50), k in 1usize..5, seed in any::<u64>()) {
        prop_assume!(k <= rows.len());
        let pts = Points::from_rows(&rows);
        let fit = kmeans(&pts, k, 3, 100, &mut rng::seeded(seed)).unwrap();
        prop_assert_eq!(fit.labels.len(), rows.len());
        prop_assert!(fit.labels.iter().all(|&l| l < k));
        prop_assert_eq!(fit.centroids.len(), k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn every_scheme_returns_a_permutation(seed in 0u64..10_000) {
        let (g, params, _) = common::random_instance(3, 5, seed);
        let amb = g.ambiguous();
        prop_assert!(nominate_lc(&g, &params).unwrap().is_permutation_of(amb));
        prop_assert!(nominate_random(&g, seed).is_permutation_of(amb));
        let n = g.num_vertices();
        if n >= 4 {
            if let Ok(list) = nominate_lp(&g, &LpConfig::new(2, 2.min(n), seed)) {
                prop_assert!(list.is_permutation_of(amb));
            }
            if let Ok(list) = nominate_lep(&g, &LepConfig::new(1, 2, seed)) {
                prop_assert!(list.is_permutation_of(amb));
                prop_assert!(list.scores().windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }
}
