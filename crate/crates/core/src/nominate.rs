//! The nomination schemes behind one interface.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::canonical::{canonical_nominate, enumerate_posterior_with, CanonicalConfig};
use crate::embed::{adjacency_spectral_embed_with, EmbedConfig, Embedding};
use crate::error::{Error, Result};
use crate::gmm::{select_model, BicLikelihood, DEFAULT_INIT_RESTARTS, CovarianceModel, EmConfig, SelectConfig, Selection, Supervision};
use crate::likelihood::log_sum_exp;
use crate::kmeans::kmeans;
use crate::mcmc::{cs_nominate, run_chain, McmcConfig};
use crate::nomination::{NominationList, SchemeTag};
use crate::points::{sq_dist, Points};
use crate::rng;
use crate::sbm::{estimate_bernoulli, estimate_block_sizes, SbmParams, SeededGraph};

pub const DEFAULT_KMEANS_RESTARTS: usize = 1000;
pub const DEFAULT_KMEANS_ITERATIONS: usize = 100;

/// Canonical scheme: exact posterior by enumeration.
pub fn nominate_lc(g: &SeededGraph, params: &SbmParams) -> Result<NominationList> {
    nominate_lc_with(g, params, &CanonicalConfig::default())
}

pub fn nominate_lc_with(g: &SeededGraph, params: &SbmParams, config: &CanonicalConfig) -> Result<NominationList> {
    Ok(canonical_nominate(&enumerate_posterior_with(g, params, config)?))
}

/// Canonical sampling scheme.
pub fn nominate_lcs(g: &SeededGraph, params: &SbmParams, config: &McmcConfig) -> Result<NominationList> {
    Ok(cs_nominate(&run_chain(g, params, config)?))
}

/// Plug-in parameters from the seeds: Bernoulli matrix from seed-pair densities
/// and block sizes from seed proportions.
pub fn estimate_params(g: &SeededGraph) -> Result<SbmParams> {
    let bernoulli = estimate_bernoulli(g)?;
    SbmParams::new(estimate_block_sizes(g)?, bernoulli)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpConfig {
    pub dim: usize,
    /// Number of k-means clusters.
    pub k: usize,
    pub restarts: usize,
    pub max_iter: usize,
    /// Break exact distance ties uniformly at random instead of by vertex id.
    pub random_ties: bool,
    pub rng_seed: u64,
}

impl LpConfig {
    pub fn new(dim: usize, k: usize, rng_seed: u64) -> Self {
        Self {
            dim,
            k,
            restarts: DEFAULT_KMEANS_RESTARTS,
            max_iter: DEFAULT_KMEANS_ITERATIONS,
            random_ties: false,
            rng_seed,
        }
    }
}

/// Spectral partitioning: embed, cluster with k-means, rank by distance to
/// the centroid of the cluster holding the most block-1 seeds.
pub fn nominate_lp(g: &SeededGraph, config: &LpConfig) -> Result<NominationList> {
    let emb = adjacency_spectral_embed_with(g.graph(), config.dim, &EmbedConfig::default())?;
    nominate_lp_embedded(g, &emb, config)
}

pub fn nominate_lp_embedded(g: &SeededGraph, emb: &Embedding, config: &LpConfig) -> Result<NominationList> {
    let interest: Vec<usize> = g.seeds_in_block(1).collect();
    if interest.is_empty() {
        return Err(Error::NoInterestSeeds);
    }
    let emb = emb.truncate(config.dim)?;
    let pts = Points::from_matrix(emb.coords());
    let mut rng = rng::seeded(config.rng_seed);
    let fit = kmeans(&pts, config.k, config.restarts, config.max_iter, &mut rng)?;

    let mut votes = vec![0usize; config.k];
    for &v in &interest {
        votes[fit.labels[v]] += 1;
    }
    let top = *votes.iter().max().unwrap();
    let seed_mean: Vec<f64> = (0..pts.dim())
        .map(|j| interest.iter().map(|&v| pts.row(v)[j]).sum::<f64>() / interest.len() as f64)
        .collect();
    let cluster = (0..config.k)
        .filter(|&c| votes[c] == top)
        .min_by(|&a, &b| {
            sq_dist(&fit.centroids[a], &seed_mean).total_cmp(&sq_dist(&fit.centroids[b], &seed_mean))
        })
        .unwrap();
    let centroid = &fit.centroids[cluster];

    let amb = g.ambiguous();
    let dist: Vec<f64> = amb.iter().map(|&v| sq_dist(pts.row(v), centroid).sqrt()).collect();
    let mut order: Vec<usize> = (0..amb.len()).collect();
    if config.random_ties {
        let keys: Vec<u64> = (0..amb.len()).map(|_| rng.random()).collect();
        order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(keys[a].cmp(&keys[b])));
    } else {
        order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(amb[a].cmp(&amb[b])));
    }
    NominationList::from_ordered(
        order.iter().map(|&i| amb[i]).collect(),
        order.iter().map(|&i| -dist[i]).collect(),
        SchemeTag::Lp,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct LepConfig {
    pub dim: usize,
    /// Largest number of mixture components considered.
    pub max_components: usize,
    pub catalogue: Vec<CovarianceModel>,
    /// Known block sizes fix the mixture weights to `n_k / n`.
    pub block_sizes: Option<Vec<usize>>,
    /// Treat seeds outside block 1 as known only to be outside it.
    pub quasi_seeds: bool,
    pub em: EmConfig,
    pub likelihood: BicLikelihood,
    pub ranking: LepRanking,
    /// Semi-supervised k-means++ runs per candidate mixture.
    pub init_restarts: usize,
    pub rng_seed: u64,
}

/// Score used to order vertices under the selected mixture.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LepRanking {
    /// Posterior probability of component 1, `π̂₁f₁ / Σ_k π̂_k f_k`; ties by `π̂₁f₁`.
    #[default]
    Posterior,
    /// The weighted density `π̂₁f₁` alone.
    Density,
}

impl std::str::FromStr for LepRanking {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "posterior" => Ok(Self::Posterior),
            "density" => Ok(Self::Density),
            other => Err(Error::InvalidConfig(format!(
                "unknown ranking '{other}' (expected posterior or density)"
            ))),
        }
    }
}

impl LepConfig {
    /// Full implemented catalogue, free weights.
    pub fn new(dim: usize, max_components: usize, rng_seed: u64) -> Self {
        Self {
            dim,
            max_components,
            catalogue: CovarianceModel::ALL.to_vec(),
            block_sizes: None,
            quasi_seeds: false,
            em: EmConfig::default(),
            likelihood: BicLikelihood::default(),
            ranking: LepRanking::default(),
            init_restarts: DEFAULT_INIT_RESTARTS,
            rng_seed,
        }
    }
}

/// Extended spectral partitioning: embed, fit semi-supervised mixtures,
/// rank by the interest component (see [`LepRanking`]).
pub fn nominate_lep(g: &SeededGraph, config: &LepConfig) -> Result<NominationList> {
    Ok(nominate_lep_detailed(g, config)?.0)
}

/// Also returns the BIC′ table and the selected fit.
pub fn nominate_lep_detailed(g: &SeededGraph, config: &LepConfig) -> Result<(NominationList, Selection)> {
    let emb = adjacency_spectral_embed_with(g.graph(), config.dim, &EmbedConfig::default())?;
    nominate_lep_embedded(g, &emb, config)
}

pub fn nominate_lep_embedded(
    g: &SeededGraph,
    emb: &Embedding,
    config: &LepConfig,
) -> Result<(NominationList, Selection)> {
    if g.seeds_in_block(1).next().is_none() {
        return Err(Error::NoInterestSeeds);
    }
    let emb = emb.truncate(config.dim)?;
    let pts = Points::from_matrix(emb.coords());
    let labels: Vec<Option<usize>> = (0..g.num_vertices()).map(|v| g.seed_label(v).map(|b| b - 1)).collect();
    let supervision = if config.quasi_seeds {
        Supervision::quasi(&labels)
    } else {
        Supervision::full(&labels)
    };
    let select = SelectConfig {
        max_components: config.max_components,
        catalogue: config.catalogue.clone(),
        block_sizes: config.block_sizes.clone(),
        em: config.em,
        likelihood: config.likelihood,
        init_restarts: config.init_restarts,
        rng_seed: config.rng_seed,
    };
    let selection = select_model(&pts, &supervision, &select)?;
    let amb = g.ambiguous();
    let fit = &selection.best;
    let log_density: Vec<f64> = amb.iter().map(|&v| fit.log_weighted_density(0, pts.row(v))).collect();
    let log_scores: Vec<f64> = match config.ranking {
        LepRanking::Density => log_density.clone(),
        LepRanking::Posterior => {
            let mut terms = vec![0.0; fit.num_components()];
            amb.iter()
                .zip(&log_density)
                .map(|(&v, &own)| {
                    for (k, t) in terms.iter_mut().enumerate() {
                        *t = fit.log_weighted_density(k, pts.row(v));
                    }
                    own - log_sum_exp(&terms)
                })
                .collect()
        }
    };
    let mut order: Vec<usize> = (0..amb.len()).collect();
    order.sort_by(|&a, &b| {
        log_scores[b]
            .total_cmp(&log_scores[a])
            .then(log_density[b].total_cmp(&log_density[a]))
            .then(amb[a].cmp(&amb[b]))
    });
    let list = NominationList::from_ordered(
        order.iter().map(|&i| amb[i]).collect(),
        order.iter().map(|&i| log_scores[i].exp()).collect(),
        SchemeTag::Lep,
    )?;
    Ok((list, selection))
}

/// Uniformly random ordering; a chance-level baseline.
pub fn nominate_random(g: &SeededGraph, rng_seed: u64) -> NominationList {
    let mut order = g.ambiguous().to_vec();
    order.shuffle(&mut rng::seeded(rng_seed));
    let n = order.len();
    let scores = (0..n).map(|i| (n - i) as f64 / n as f64).collect();
    NominationList::from_ordered(order, scores, SchemeTag::Random).expect("scores decrease")
}
