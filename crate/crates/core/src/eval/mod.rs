//! Average precision, Monte Carlo MAP estimation and equal-time budgeting.

mod experiments;

pub use experiments::{
    nmcmc_sweep, table3, table4, table5, NmcmcSweepOptions, Table3Options, Table4Options, Table5Options,
};

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::canonical::CanonicalConfig;
use crate::error::{Error, Result};
use crate::mcmc::McmcConfig;
use crate::nominate::{self, LepConfig, LpConfig};
use crate::nomination::{NominationList, SchemeTag};
use crate::presets::Setup;
use crate::rng::{self, derive_seed};
use crate::sbm::{designate_seeds, random_membership, sample_graph, GroundTruth, SbmParams, SeededGraph};

/// Mean of precision@j over depths `j = 1..=n₁−m₁`, where `n₁−m₁` counts the
/// block-1 vertices in the list.
pub fn average_precision(list: &NominationList, truth: &GroundTruth) -> Result<f64> {
    let hits = indicators(list, truth)?;
    let depth = hits.iter().filter(|&&h| h).count();
    if depth == 0 {
        return Err(Error::EmptyDepthRange);
    }
    let mut found = 0usize;
    let mut total = 0.0;
    for (j, &h) in hits.iter().take(depth).enumerate() {
        found += usize::from(h);
        total += found as f64 / (j + 1) as f64;
    }
    Ok(total / depth as f64)
}

/// Fraction of the first `j` list entries in block 1.
pub fn precision_at(list: &NominationList, truth: &GroundTruth, j: usize) -> Result<f64> {
    let hits = indicators(list, truth)?;
    if j == 0 || j > hits.len() {
        return Err(Error::InvalidConfig(format!("depth {j} outside 1..={}", hits.len())));
    }
    Ok(hits[..j].iter().filter(|&&h| h).count() as f64 / j as f64)
}

/// Block-1 membership of each list position.
pub fn indicators(list: &NominationList, truth: &GroundTruth) -> Result<Vec<bool>> {
    list.vertices()
        .iter()
        .map(|&v| {
            if v >= truth.labels().len() {
                Err(Error::VertexMismatch(format!("listed vertex {v} has no ground-truth block")))
            } else {
                Ok(truth.in_interest_block(v))
            }
        })
        .collect()
}

/// Per-position probability of holding a block-1 vertex across replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecisionCurve {
    probs: Vec<f64>,
    replicates: usize,
}

impl PrecisionCurve {
    pub fn from_indicators(rows: &[Vec<bool>]) -> Result<Self> {
        let len = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != len) {
            return Err(Error::VertexMismatch("replicate lists differ in length".into()));
        }
        let mut counts = vec![0u64; len];
        for r in rows {
            for (c, &h) in counts.iter_mut().zip(r) {
                *c += u64::from(h);
            }
        }
        let n = rows.len().max(1) as f64;
        Ok(Self {
            probs: counts.iter().map(|&c| c as f64 / n).collect(),
            replicates: rows.len(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    /// MAP recovered from the curve alone: average precision is linear in the
    /// position indicators when the depth is fixed.
    pub fn implied_map(&self, depth: usize) -> f64 {
        let mut prefix = 0.0;
        let mut total = 0.0;
        for (j, p) in self.probs.iter().take(depth).enumerate() {
            prefix += p;
            total += prefix / (j + 1) as f64;
        }
        total / depth as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("position,probability\n");
        for (i, p) in self.probs.iter().enumerate() {
            let _ = writeln!(out, "{},{p}", i + 1);
        }
        out
    }
}

/// Burn-in rule for sampling schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BurnIn {
    /// Half of the steps.
    Half,
    Fixed(u64),
}

impl BurnIn {
    pub fn config(self, steps: u64, rng_seed: u64) -> McmcConfig {
        match self {
            BurnIn::Half => McmcConfig::new(steps, rng_seed),
            BurnIn::Fixed(t) => {
                if steps <= t {
                    log::warn!("{steps} steps do not exceed the burn-in {t}; keeping a single sample");
                }
                McmcConfig::with_fixed_burn_in(t, steps.saturating_sub(t).max(1), rng_seed)
            }
        }
    }
}

/// What to run on each replicate. Per-scheme RNG seeds are replaced by
/// replicate-derived ones.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeSpec {
    Canonical(CanonicalConfig),
    Sampling {
        steps: u64,
        burn_in: BurnIn,
        /// Use seed-based estimates instead of the true parameters.
        estimate_params: bool,
    },
    /// Sampling with a step budget matching the mean runtime of the scheme labelled `reference`.
    Equitime { reference: String, burn_in: BurnIn },
    Spectral(LpConfig),
    Extended(LepConfig),
    Random,
}

impl SchemeSpec {
    pub fn tag(&self) -> SchemeTag {
        match self {
            SchemeSpec::Canonical(_) => SchemeTag::Lc,
            SchemeSpec::Sampling { .. } | SchemeSpec::Equitime { .. } => SchemeTag::Lcs,
            SchemeSpec::Spectral(_) => SchemeTag::Lp,
            SchemeSpec::Extended(_) => SchemeTag::Lep,
            SchemeSpec::Random => SchemeTag::Random,
        }
    }

    fn describe(&self) -> String {
        match self {
            SchemeSpec::Canonical(c) => format!("lc max_assignments={:e}", c.max_assignments),
            SchemeSpec::Sampling {
                steps,
                burn_in,
                estimate_params,
            } => format!("lcs nmcmc={steps} burn_in={burn_in:?} estimate_params={estimate_params}"),
            SchemeSpec::Equitime { reference, burn_in } => format!("lcs equitime reference={reference} burn_in={burn_in:?}"),
            SchemeSpec::Spectral(c) => format!("lp dim={} k={} restarts={}", c.dim, c.k, c.restarts),
            SchemeSpec::Extended(c) => format!(
                "lep dim={} max_k={} catalogue={} quasi={} bic={:?} ranking={:?}",
                c.dim,
                c.max_components,
                c.catalogue.iter().map(|m| m.name()).collect::<Vec<_>>().join("+"),
                c.quasi_seeds,
                c.likelihood,
                c.ranking
            ),
            SchemeSpec::Random => "random".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeRun {
    pub label: String,
    pub spec: SchemeSpec,
}

impl SchemeRun {
    pub fn new(label: impl Into<String>, spec: SchemeSpec) -> Self {
        Self {
            label: label.into(),
            spec,
        }
    }
}

/// Generative setting for the replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub name: String,
    pub params: SbmParams,
    pub seed_counts: Vec<usize>,
}

impl Protocol {
    pub fn new(name: impl Into<String>, params: SbmParams, seed_counts: Vec<usize>) -> Result<Self> {
        if seed_counts.len() != params.num_blocks() {
            return Err(Error::InvalidParams("one seed count per block is required".into()));
        }
        for (i, (&m, &n)) in seed_counts.iter().zip(params.block_sizes()).enumerate() {
            if m > n {
                return Err(Error::TooManySeeds {
                    block: i + 1,
                    requested: m,
                    available: n,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            params,
            seed_counts,
        })
    }

    pub fn from_setup(setup: &Setup) -> Self {
        Self::new(setup.scale.name(), setup.params.clone(), setup.seed_counts.clone())
            .expect("presets are consistent")
    }

    /// Replicate `index`: random block membership, sampled graph, uniformly chosen seeds.
    pub fn replicate(&self, rng_seed: u64, index: usize) -> Result<(SeededGraph, GroundTruth)> {
        let base = derive_seed(rng_seed, index as u64);
        let membership = random_membership(self.params.block_sizes(), &mut rng::seeded(derive_seed(base, 0)));
        let graph = sample_graph(&self.params, &membership, derive_seed(base, 1))?;
        designate_seeds(graph, &membership, &self.seed_counts, derive_seed(base, 2))
    }
}

/// Seed for scheme `scheme` on replicate `index`.
fn scheme_seed(rng_seed: u64, index: usize, scheme: usize) -> u64 {
    derive_seed(derive_seed(rng_seed, index as u64), 100 + scheme as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub replicates: usize,
    pub rng_seed: u64,
    /// Worker threads for replicates; 0 uses the global pool.
    pub jobs: usize,
    pub calibration: CalibrationPlan,
}

impl ExperimentConfig {
    pub fn new(replicates: usize, rng_seed: u64) -> Self {
        Self {
            replicates,
            rng_seed,
            jobs: 0,
            calibration: CalibrationPlan::default(),
        }
    }
}

/// Aggregate result for one scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub label: String,
    pub scheme: SchemeTag,
    pub protocol: String,
    pub replicates: usize,
    pub map: f64,
    /// Standard deviation of per-replicate AP over √nMC.
    pub std_error: f64,
    pub mean_seconds: f64,
    pub median_seconds: f64,
    /// Step budget for sampling schemes.
    pub mcmc_steps: Option<u64>,
    /// Runtime the step budget was solved for (equal-time runs).
    pub target_seconds: Option<f64>,
    pub config: String,
    pub average_precisions: Vec<f64>,
    pub curve: PrecisionCurve,
}

impl ExperimentReport {
    /// Depth `n₁ − m₁` shared by every replicate.
    pub fn depth(&self, protocol: &Protocol) -> usize {
        protocol.params.block_sizes()[0] - protocol.seed_counts[0]
    }
}

struct Outcome {
    ap: f64,
    hits: Vec<bool>,
    seconds: f64,
}

fn run_one(g: &SeededGraph, params: &SbmParams, spec: &SchemeSpec, steps: Option<u64>, seed: u64) -> Result<NominationList> {
    match spec {
        SchemeSpec::Canonical(cfg) => nominate::nominate_lc_with(g, params, cfg),
        SchemeSpec::Sampling {
            steps,
            burn_in,
            estimate_params,
        } => {
            let est;
            let p = if *estimate_params {
                est = nominate::estimate_params(g)?;
                &est
            } else {
                params
            };
            nominate::nominate_lcs(g, p, &burn_in.config(*steps, seed))
        }
        SchemeSpec::Equitime { burn_in, .. } => {
            let steps = steps.expect("equal-time budget resolved before running");
            nominate::nominate_lcs(g, params, &burn_in.config(steps, seed))
        }
        SchemeSpec::Spectral(cfg) => nominate::nominate_lp(
            g,
            &LpConfig {
                rng_seed: seed,
                ..cfg.clone()
            },
        ),
        SchemeSpec::Extended(cfg) => nominate::nominate_lep(
            g,
            &LepConfig {
                rng_seed: seed,
                ..cfg.clone()
            },
        ),
        SchemeSpec::Random => Ok(nominate::nominate_random(g, seed)),
    }
}

fn summarize(
    run: &SchemeRun,
    protocol: &Protocol,
    outcomes: Vec<Outcome>,
    steps: Option<u64>,
    target: Option<f64>,
) -> Result<ExperimentReport> {
    let n = outcomes.len();
    let aps: Vec<f64> = outcomes.iter().map(|o| o.ap).collect();
    let map = aps.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        aps.iter().map(|a| (a - map).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let mut secs: Vec<f64> = outcomes.iter().map(|o| o.seconds).collect();
    let mean_seconds = secs.iter().sum::<f64>() / n as f64;
    secs.sort_by(f64::total_cmp);
    let median_seconds = if n % 2 == 1 {
        secs[n / 2]
    } else {
        0.5 * (secs[n / 2 - 1] + secs[n / 2])
    };
    let hits: Vec<Vec<bool>> = outcomes.into_iter().map(|o| o.hits).collect();
    Ok(ExperimentReport {
        label: run.label.clone(),
        scheme: run.spec.tag(),
        protocol: protocol.name.clone(),
        replicates: n,
        map,
        std_error: (var / n as f64).sqrt(),
        mean_seconds,
        median_seconds,
        mcmc_steps: steps.or(match run.spec {
            SchemeSpec::Sampling { steps, .. } => Some(steps),
            _ => None,
        }),
        target_seconds: target,
        config: run.spec.describe(),
        average_precisions: aps,
        curve: PrecisionCurve::from_indicators(&hits)?,
    })
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every scheme on the same `replicates` graphs. Equal-time schemes run
/// last, once their reference scheme's mean runtime is known.
pub fn run_experiment(protocol: &Protocol, schemes: &[SchemeRun], config: &ExperimentConfig) -> Result<Vec<ExperimentReport>> {
    if config.replicates == 0 {
        return Err(Error::InvalidConfig("at least one replicate is required".into()));
    }
    let mut reports: Vec<Option<ExperimentReport>> = vec![None; schemes.len()];
    let direct: Vec<usize> = (0..schemes.len())
        .filter(|&j| !matches!(schemes[j].spec, SchemeSpec::Equitime { .. }))
        .collect();
    let run_schemes = |which: &[usize], steps: &[Option<u64>]| -> Result<Vec<Vec<Outcome>>> {
        let per_rep: Vec<Result<Vec<Outcome>>> = in_pool(config.jobs, || {
            (0..config.replicates)
                .into_par_iter()
                .map(|r| {
                    let wrap = |e: Error| Error::Replicate {
                        index: r,
                        source: Box::new(e),
                    };
                    let (g, truth) = protocol.replicate(config.rng_seed, r).map_err(wrap)?;
                    which
                        .iter()
                        .zip(steps)
                        .map(|(&j, &st)| {
                            let seed = scheme_seed(config.rng_seed, r, j);
                            let start = Instant::now();
                            let list = run_one(&g, &protocol.params, &schemes[j].spec, st, seed).map_err(wrap)?;
                            let seconds = start.elapsed().as_secs_f64();
                            if !list.is_permutation_of(g.ambiguous()) {
                                return Err(wrap(Error::VertexMismatch(format!(
                                    "{} did not return a permutation of the ambiguous vertices",
                                    schemes[j].label
                                ))));
                            }
                            let hits = indicators(&list, &truth).map_err(wrap)?;
                            let ap = average_precision(&list, &truth).map_err(wrap)?;
                            Ok(Outcome { ap, hits, seconds })
                        })
                        .collect()
                })
                .collect()
        })?;
        // transpose to per-scheme outcome lists
        let mut by_scheme: Vec<Vec<Outcome>> = which.iter().map(|_| Vec::new()).collect();
        for rep in per_rep {
            for (slot, o) in by_scheme.iter_mut().zip(rep?) {
                slot.push(o);
            }
        }
        Ok(by_scheme)
    };

    let outcomes = run_schemes(&direct, &vec![None; direct.len()])?;
    for (&j, o) in direct.iter().zip(outcomes) {
        reports[j] = Some(summarize(&schemes[j], protocol, o, None, None)?);
    }

    for j in 0..schemes.len() {
        let SchemeSpec::Equitime { reference, burn_in } = &schemes[j].spec else {
            continue;
        };
        let target = reports
            .iter()
            .flatten()
            .find(|r| &r.label == reference)
            .ok_or_else(|| Error::InvalidConfig(format!("equal-time reference '{reference}' is not among the schemes")))?
            .mean_seconds;
        let (g, _) = protocol.replicate(config.rng_seed, 0)?;
        let calibration = Calibration::measure(&g, &protocol.params, *burn_in, &config.calibration, config.rng_seed)?;
        let steps = equitime_mcmc_steps(target, &calibration)?;
        // the line is extrapolated well past the calibration lengths; one timed
        // run at the solved budget rescales the per-step cost
        let checks: Vec<SeededGraph> = (0..config.replicates.min(config.calibration.repeats.max(1)))
            .map(|r| protocol.replicate(config.rng_seed, r).map(|(g, _)| g))
            .collect::<Result<_>>()?;
        let steps = calibration.verify(&checks, &protocol.params, *burn_in, config.rng_seed, steps, target)?;
        log::info!(
            "{}: {steps} steps for {target:.4}s (overhead {:.2e}s, {:.2e}s/step)",
            schemes[j].label,
            calibration.overhead_seconds,
            calibration.seconds_per_step
        );
        let o = run_schemes(&[j], &[Some(steps)])?.remove(0);
        reports[j] = Some(summarize(&schemes[j], protocol, o, Some(steps), Some(target))?);
    }
    Ok(reports.into_iter().map(Option::unwrap).collect())
}

/// How the sampler's cost model is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationPlan {
    pub low_steps: u64,
    pub high_steps: u64,
    /// Timings per step count; the median is kept.
    pub repeats: usize,
}

impl Default for CalibrationPlan {
    fn default() -> Self {
        Self {
            low_steps: 20_000,
            high_steps: 400_000,
            repeats: 3,
        }
    }
}

/// Linear cost model `seconds = overhead + steps · seconds_per_step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub overhead_seconds: f64,
    pub seconds_per_step: f64,
}

impl Calibration {
    /// Line through a measured `(steps, seconds)` point with a known overhead.
    pub fn from_point(overhead_seconds: f64, steps: u64, seconds: f64) -> Result<Self> {
        if steps == 0 || seconds <= overhead_seconds {
            return Err(Error::InvalidConfig("calibration point must exceed the overhead".into()));
        }
        Ok(Self {
            overhead_seconds,
            seconds_per_step: (seconds - overhead_seconds) / steps as f64,
        })
    }

    /// Least-squares line through `(steps, seconds)` measurements; the
    /// intercept is clamped at zero.
    pub fn fit(points: &[(u64, f64)]) -> Result<Self> {
        let distinct = points.iter().map(|p| p.0).collect::<std::collections::BTreeSet<_>>();
        if distinct.len() < 2 {
            return Err(Error::InvalidConfig("calibration needs two distinct step counts".into()));
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0 as f64).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        if !(slope > 0.0) {
            return Err(Error::InvalidConfig("calibration timings do not grow with the step count".into()));
        }
        Ok(Self {
            overhead_seconds: (my - slope * mx).max(0.0),
            seconds_per_step: slope,
        })
    }

    /// Times the sampling scheme on `g` at two chain lengths.
    pub fn measure(g: &SeededGraph, params: &SbmParams, burn_in: BurnIn, plan: &CalibrationPlan, rng_seed: u64) -> Result<Self> {
        let mut points = Vec::new();
        for steps in [plan.low_steps, plan.high_steps] {
            let mut times = Vec::new();
            for rep in 0..plan.repeats.max(1) {
                let cfg = burn_in.config(steps, derive_seed(rng_seed, rep as u64));
                let start = Instant::now();
                nominate::nominate_lcs(g, params, &cfg)?;
                times.push(start.elapsed().as_secs_f64());
            }
            times.sort_by(f64::total_cmp);
            // a fixed burn-in can push the real length above `steps`
            points.push((cfg_steps(burn_in, steps), times[times.len() / 2]));
        }
        Self::fit(&points)
    }

    /// Times the sampler at `steps` once per graph and, if the mean runtime
    /// misses `target_seconds` by more than 5%, returns the budget that the
    /// measured per-step cost predicts instead.
    pub fn verify(
        &self,
        graphs: &[SeededGraph],
        params: &SbmParams,
        burn_in: BurnIn,
        rng_seed: u64,
        steps: u64,
        target_seconds: f64,
    ) -> Result<u64> {
        if graphs.is_empty() {
            return Ok(steps);
        }
        let mut total = 0.0;
        for (i, g) in graphs.iter().enumerate() {
            let cfg = burn_in.config(steps, derive_seed(rng_seed, 1000 + i as u64));
            let start = Instant::now();
            nominate::nominate_lcs(g, params, &cfg)?;
            total += start.elapsed().as_secs_f64();
        }
        let measured = total / graphs.len() as f64;
        if (measured - target_seconds).abs() <= 0.05 * target_seconds || measured <= self.overhead_seconds {
            return Ok(steps);
        }
        let per_step = (measured - self.overhead_seconds) / cfg_steps(burn_in, steps) as f64;
        let corrected = Calibration {
            overhead_seconds: self.overhead_seconds,
            seconds_per_step: per_step,
        };
        log::info!("equal-time check: {measured:.4}s at {steps} steps for a {target_seconds:.4}s target; rescaling");
        equitime_mcmc_steps(target_seconds, &corrected)
    }

    pub fn predict(&self, steps: u64) -> f64 {
        self.overhead_seconds + steps as f64 * self.seconds_per_step
    }
}

fn cfg_steps(burn_in: BurnIn, steps: u64) -> u64 {
    burn_in.config(steps, 0).n_steps
}

/// Step budget whose predicted runtime equals `target_seconds`.
pub fn equitime_mcmc_steps(target_seconds: f64, calibration: &Calibration) -> Result<u64> {
    if target_seconds <= calibration.overhead_seconds {
        return Err(Error::BudgetBelowOverhead {
            target: target_seconds,
            overhead: calibration.overhead_seconds,
        });
    }
    Ok(((target_seconds - calibration.overhead_seconds) / calibration.seconds_per_step).round() as u64)
}

pub fn reports_to_csv(reports: &[ExperimentReport]) -> String {
    let mut out =
        String::from("protocol,label,scheme,replicates,map,std_error,mean_seconds,median_seconds,mcmc_steps,config\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{},\"{}\"",
            r.protocol,
            r.label,
            r.scheme,
            r.replicates,
            r.map,
            r.std_error,
            r.mean_seconds,
            r.median_seconds,
            r.mcmc_steps.map_or(String::new(), |s| s.to_string()),
            r.config
        );
    }
    out
}

/// Fixed-width table with MAP ± 2 s.e.
pub fn format_reports(reports: &[ExperimentReport]) -> String {
    let mut out = format!(
        "{:<16} {:<22} {:>6} {:>16} {:>10} {:>10} {:>10}\n",
        "protocol", "scheme", "nMC", "MAP ± 2se", "mean s", "median s", "nMCMC"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<16} {:<22} {:>6} {:>9.4} ± {:.3} {:>10.4} {:>10.4} {:>10}",
            r.protocol,
            r.label,
            r.replicates,
            r.map,
            2.0 * r.std_error,
            r.mean_seconds,
            r.median_seconds,
            r.mcmc_steps.map_or("-".to_string(), |s| s.to_string())
        );
    }
    out
}
