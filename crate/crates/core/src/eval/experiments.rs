//! Preset experiment protocols over the standard SBM scales.

use super::{run_experiment, BurnIn, ExperimentConfig, ExperimentReport, Protocol, SchemeRun, SchemeSpec};
use crate::canonical::CanonicalConfig;
use crate::error::Result;
use crate::gmm::{BicLikelihood, CovarianceModel};
use crate::nominate::{LepConfig, LepRanking, LpConfig, DEFAULT_KMEANS_RESTARTS};
use crate::presets::Scale;

/// Exact versus sampled canonical scheme on the small scales.
#[derive(Debug, Clone, PartialEq)]
pub struct Table3Options {
    pub scales: Vec<Scale>,
    pub replicates: usize,
    pub nmcmc: u64,
    pub rng_seed: u64,
    pub jobs: usize,
}

impl Default for Table3Options {
    fn default() -> Self {
        Self {
            scales: vec![Scale::SmallSmall, Scale::MediumSmall, Scale::LargeSmall],
            replicates: 2000,
            nmcmc: 10_000,
            rng_seed: 2018,
            jobs: 0,
        }
    }
}

pub fn table3(opts: &Table3Options) -> Result<Vec<ExperimentReport>> {
    let mut out = Vec::new();
    for &scale in &opts.scales {
        let protocol = Protocol::from_setup(&scale.setup());
        let schemes = [
            SchemeRun::new("lc", SchemeSpec::Canonical(CanonicalConfig::default())),
            SchemeRun::new(
                "lcs",
                SchemeSpec::Sampling {
                    steps: opts.nmcmc,
                    burn_in: BurnIn::Half,
                    estimate_params: false,
                },
            ),
        ];
        let mut cfg = ExperimentConfig::new(opts.replicates, opts.rng_seed);
        cfg.jobs = opts.jobs;
        out.extend(run_experiment(&protocol, &schemes, &cfg)?);
    }
    Ok(out)
}

/// Spectral schemes against equal-time and long sampling runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Table4Options {
    pub scale: Scale,
    pub replicates: usize,
    pub dim: usize,
    /// k-means clusters for the spectral scheme.
    pub k: usize,
    /// Largest mixture size for the extended scheme.
    pub max_components: usize,
    pub catalogue: Vec<CovarianceModel>,
    pub likelihood: BicLikelihood,
    pub ranking: LepRanking,
    pub restarts: usize,
    pub long_nmcmc: u64,
    pub equitime: bool,
    pub rng_seed: u64,
    pub jobs: usize,
}

impl Table4Options {
    pub fn new(scale: Scale) -> Self {
        Self {
            scale,
            replicates: 50,
            dim: 3,
            k: 3,
            max_components: 4,
            catalogue: CovarianceModel::ALL.to_vec(),
            likelihood: BicLikelihood::default(),
            ranking: LepRanking::default(),
            restarts: DEFAULT_KMEANS_RESTARTS,
            long_nmcmc: 100_000,
            equitime: true,
            rng_seed: 2018,
            jobs: 0,
        }
    }
}

pub fn table4(opts: &Table4Options) -> Result<Vec<ExperimentReport>> {
    let protocol = Protocol::from_setup(&opts.scale.setup());
    let mut lp = LpConfig::new(opts.dim, opts.k, 0);
    lp.restarts = opts.restarts;
    let mut lep = LepConfig::new(opts.dim, opts.max_components, 0);
    lep.catalogue = opts.catalogue.clone();
    lep.likelihood = opts.likelihood;
    lep.ranking = opts.ranking;
    let mut schemes = vec![
        SchemeRun::new("lp", SchemeSpec::Spectral(lp)),
        SchemeRun::new("lep", SchemeSpec::Extended(lep)),
    ];
    if opts.equitime {
        schemes.push(SchemeRun::new(
            "lcs-equitime",
            SchemeSpec::Equitime {
                reference: "lep".into(),
                burn_in: BurnIn::Half,
            },
        ));
    }
    schemes.push(SchemeRun::new(
        format!("lcs-{}", opts.long_nmcmc),
        SchemeSpec::Sampling {
            steps: opts.long_nmcmc,
            burn_in: BurnIn::Half,
            estimate_params: false,
        },
    ));
    let mut cfg = ExperimentConfig::new(opts.replicates, opts.rng_seed);
    cfg.jobs = opts.jobs;
    run_experiment(&protocol, &schemes, &cfg)
}

/// Embedding-dimension sweep on the ten-block setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Table5Options {
    pub dims: Vec<usize>,
    pub replicates: usize,
    pub max_components: usize,
    pub catalogue: Vec<CovarianceModel>,
    pub likelihood: BicLikelihood,
    pub ranking: LepRanking,
    /// Fixed sampler burn-in; the step budget is unknown beforehand.
    pub burn_in: u64,
    pub equitime: bool,
    pub rng_seed: u64,
    pub jobs: usize,
}

impl Default for Table5Options {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4, 5, 8, 9, 10, 11, 12, 15, 20],
            replicates: 50,
            max_components: 10,
            catalogue: CovarianceModel::ALL.to_vec(),
            likelihood: BicLikelihood::default(),
            ranking: LepRanking::default(),
            burn_in: 5000,
            equitime: true,
            rng_seed: 2018,
            jobs: 0,
        }
    }
}

/// One `(dimension, reports)` entry per swept dimension; every dimension sees
/// the same replicate graphs.
pub fn table5(opts: &Table5Options) -> Result<Vec<(usize, Vec<ExperimentReport>)>> {
    let protocol = Protocol::from_setup(&Scale::TenBlock.setup());
    let mut out = Vec::new();
    for &dim in &opts.dims {
        let mut lep = LepConfig::new(dim, opts.max_components, 0);
        lep.catalogue = opts.catalogue.clone();
        lep.likelihood = opts.likelihood;
        lep.ranking = opts.ranking;
        let mut schemes = vec![SchemeRun::new(format!("lep-d{dim}"), SchemeSpec::Extended(lep))];
        if opts.equitime {
            schemes.push(SchemeRun::new(
                format!("lcs-equitime-d{dim}"),
                SchemeSpec::Equitime {
                    reference: format!("lep-d{dim}"),
                    burn_in: BurnIn::Fixed(opts.burn_in),
                },
            ));
        }
        let mut cfg = ExperimentConfig::new(opts.replicates, opts.rng_seed);
        cfg.jobs = opts.jobs;
        out.push((dim, run_experiment(&protocol, &schemes, &cfg)?));
    }
    Ok(out)
}

/// Sampling scheme at increasing chain lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct NmcmcSweepOptions {
    pub scale: Scale,
    pub steps: Vec<u64>,
    pub replicates: usize,
    pub rng_seed: u64,
    pub jobs: usize,
}

impl NmcmcSweepOptions {
    pub fn new(scale: Scale) -> Self {
        Self {
            scale,
            steps: vec![1_000, 10_000, 100_000, 1_000_000],
            replicates: 50,
            rng_seed: 2018,
            jobs: 0,
        }
    }
}

pub fn nmcmc_sweep(opts: &NmcmcSweepOptions) -> Result<Vec<ExperimentReport>> {
    let protocol = Protocol::from_setup(&opts.scale.setup());
    let schemes: Vec<SchemeRun> = opts
        .steps
        .iter()
        .map(|&steps| {
            SchemeRun::new(
                format!("lcs-{steps}"),
                SchemeSpec::Sampling {
                    steps,
                    burn_in: BurnIn::Half,
                    estimate_params: false,
                },
            )
        })
        .collect();
    let mut cfg = ExperimentConfig::new(opts.replicates, opts.rng_seed);
    cfg.jobs = opts.jobs;
    run_experiment(&protocol, &schemes, &cfg)
}
