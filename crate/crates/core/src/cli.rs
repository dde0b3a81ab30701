//! The `vnom` command line.
//!
//! ```text
//! vnom generate  --preset medium --seed 7 --out run/
//! vnom nominate  --graph run/graph.edges --seeds run/seeds.txt --scheme lep --dim 3 --max-k 4
//! vnom evaluate  --nominations list.csv --truth run/truth.txt
//! vnom reproduce table4-medium --scale-down 10 --jobs 4
//! ```
//!
//! Every option may also come from a TOML file given with `--config`; keys are
//! the long flag names (`max-k = 4`). Command-line flags win.
//!
//! Exit codes: 0 success, 2 validation error, 3 capacity error, 4 numerical
//! failure. Errors are printed as one line, `error[kind]: message`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalConfig;
use crate::embed::{adjacency_spectral_embed, Embedding};
use crate::error::{Error, ErrorClass, Result};
use crate::eval::{
    self, format_reports, nmcmc_sweep, reports_to_csv, table3, table4, table5, ExperimentReport, NmcmcSweepOptions,
    Protocol, Table3Options, Table4Options, Table5Options,
};
use crate::gmm::{parse_catalogue, BicLikelihood, CovarianceModel};
use crate::io;
use crate::mcmc::McmcConfig;
use crate::nominate::{self, LepConfig, LepRanking, LpConfig};
use crate::nomination::NominationList;
use crate::presets::Scale;
use crate::sbm::{SbmParams, SeededGraph};

#[derive(Debug, Parser)]
#[command(name = "vnom", version, about = "Vertex nomination for stochastic block models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample an SBM graph with seeds; writes graph.edges, seeds.txt, truth.txt and params.toml.
    Generate(Options),
    /// Rank the ambiguous vertices of a seeded graph.
    Nominate(Options),
    /// Average precision and precision at each depth of a nomination list.
    Evaluate(Options),
    /// Monte Carlo experiment presets: table3, table4-medium, table4-large, table5, fig5.
    Reproduce {
        target: String,
        #[command(flatten)]
        options: Options,
    },
}

/// Flags shared by all subcommands; each subcommand reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// TOML file supplying any of these options.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// lc, lcs, lp, lep or random.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Embedding dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// k-means clusters (lp).
    #[arg(long)]
    pub k: Option<usize>,
    /// Largest mixture size (lep).
    #[arg(long)]
    pub max_k: Option<usize>,
    /// Comma-separated covariance structures (lep), e.g. EEV,EEE,EII.
    #[arg(long)]
    pub catalogue: Option<String>,
    /// Sampler steps, burn-in included.
    #[arg(long)]
    pub nmcmc: Option<u64>,
    /// Discarded sampler steps; defaults to half of the steps.
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// Steps between log-likelihood recounts in the sampler.
    #[arg(long)]
    pub audit_interval: Option<u64>,
    /// k-means restarts (lp).
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Estimate the block model from the seeds (lc, lcs).
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub estimate_params: bool,
    /// Also constrain block 1 away from non-seed points of other classes (lep).
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub quasi_seeds: bool,
    /// Likelihood inside BIC′ (lep): observed or complete.
    #[arg(long)]
    pub bic_likelihood: Option<String>,
    /// Vertex score under the selected mixture (lep): posterior or density.
    #[arg(long)]
    pub ranking: Option<String>,
    /// Block model parameters (TOML).
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Edge list.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Seed labels, one `vertex block` pair per line.
    #[arg(long, value_name = "FILE")]
    pub seeds: Option<PathBuf>,
    /// Ground-truth labels for every vertex.
    #[arg(long, value_name = "FILE")]
    pub truth: Option<PathBuf>,
    /// Nomination CSV to evaluate.
    #[arg(long, value_name = "FILE")]
    pub nominations: Option<PathBuf>,
    /// Output file (a directory for generate); stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Divide replicate counts and chain lengths by this factor.
    #[arg(long, value_name = "FACTOR")]
    pub scale_down: Option<f64>,
    /// Override the number of Monte Carlo replicates.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Named parameter set: small-small, medium-small, large-small, medium, large, ten-block.
    #[arg(long)]
    pub preset: Option<String>,
    /// Seeds per block, e.g. 20,0,0 (generate with --params).
    #[arg(long)]
    pub seed_counts: Option<String>,
    /// Write the embedding CSV here (lp, lep).
    #[arg(long, value_name = "FILE")]
    pub dump_embedding: Option<PathBuf>,
    /// Write the singular values here, one per line (lp, lep).
    #[arg(long, value_name = "FILE")]
    pub dump_scree: Option<PathBuf>,
    /// Write the mixture selection as JSON here (lep).
    #[arg(long, value_name = "FILE")]
    pub dump_fit: Option<PathBuf>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl Options {
    /// Values from `--config`, overridden by anything given on the command line.
    pub fn resolve(self) -> Result<Options> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = io::read_to_string(&path)?;
        let origin = path.display().to_string();
        let file: Options = toml::from_str(&text).map_err(|e| Error::Parse {
            path: origin.clone(),
            line: e
                .span()
                .map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1),
            message: e.message().to_string(),
        })?;
        let mut merged = serde_json::to_value(&file).expect("options serialize");
        let flags = serde_json::to_value(&self).expect("options serialize");
        if let (Some(base), serde_json::Value::Object(over)) = (merged.as_object_mut(), flags) {
            for (key, value) in over {
                if !value.is_null() {
                    base.insert(key, value);
                }
            }
        }
        let mut out: Options = serde_json::from_value(merged).map_err(|e| Error::Parse {
            path: origin,
            line: 0,
            message: e.to_string(),
        })?;
        out.config = self.config;
        Ok(out)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn scale_down(&self) -> Result<f64> {
        let f = self.scale_down.unwrap_or(1.0);
        if !(f.is_finite() && f >= 1.0) {
            return Err(Error::InvalidConfig(format!("--scale-down {f} must be at least 1")));
        }
        Ok(f)
    }

    fn require<'a>(&self, value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig(format!("--{flag} is required")))
    }

    fn catalogue(&self) -> Result<Vec<CovarianceModel>> {
        match &self.catalogue {
            Some(s) => parse_catalogue(s),
            None => Ok(CovarianceModel::ALL.to_vec()),
        }
    }

    fn apply_lep_options(&self, likelihood: &mut BicLikelihood, ranking: &mut LepRanking) -> Result<()> {
        if let Some(s) = &self.bic_likelihood {
            *likelihood = s.parse()?;
        }
        if let Some(s) = &self.ranking {
            *ranking = s.parse()?;
        }
        Ok(())
    }

    fn preset(&self) -> Result<Option<Scale>> {
        self.preset.as_deref().map(str::parse).transpose()
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), one_line(&e.to_string()));
            exit_code(&e)
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Validation => 2,
        ErrorClass::Capacity => 3,
        ErrorClass::Numerical => 4,
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(o) => generate(&o.resolve()?),
        Command::Nominate(o) => with_jobs(&o.resolve()?, nominate_cmd),
        Command::Evaluate(o) => evaluate(&o.resolve()?),
        Command::Reproduce { target, options } => with_jobs(&options.resolve()?, |o| reproduce(&target, o)),
    }
}

fn with_jobs(o: &Options, f: impl FnOnce(&Options) -> Result<()> + Send) -> Result<()> {
    match o.jobs {
        Some(jobs) if jobs > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(|| f(o)),
        _ => f(o),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => io::write_string(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_counts(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("seed count '{t}' is not a nonnegative integer")))
        })
        .collect()
}

fn generate(o: &Options) -> Result<()> {
    let dir = o.require(&o.out, "out")?;
    let protocol = match (o.preset()?, &o.params) {
        (Some(_), Some(_)) => return Err(Error::InvalidConfig("give either --preset or --params".into())),
        (Some(scale), None) => {
            let mut p = Protocol::from_setup(&scale.setup());
            if let Some(s) = &o.seed_counts {
                p = Protocol::new(scale.name(), p.params, parse_counts(s)?)?;
            }
            p
        }
        (None, Some(path)) => {
            let params = io::read_params(path)?;
            let counts = o
                .seed_counts
                .as_deref()
                .ok_or_else(|| Error::InvalidConfig("--seed-counts is required with --params".into()))?;
            Protocol::new("custom", params, parse_counts(counts)?)?
        }
        (None, None) => return Err(Error::InvalidConfig("--preset or --params is required".into())),
    };
    let (g, truth) = protocol.replicate(o.seed(), 0)?;
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let truth_pairs: Vec<(usize, usize)> = truth.labels().iter().copied().enumerate().collect();
    io::write_string(&dir.join("graph.edges"), &io::format_edge_list(g.graph()))?;
    io::write_string(&dir.join("seeds.txt"), &io::format_labels(&g.seed_pairs()))?;
    io::write_string(&dir.join("truth.txt"), &io::format_labels(&truth_pairs))?;
    let params_text = io::format_params(&protocol.params);
    io::write_string(&dir.join("params.toml"), &params_text)?;
    print!("{params_text}");
    Ok(())
}

/// Graph, seeds and (if given) parameters. The block count comes from the
/// parameters, otherwise from the largest seed label.
fn load_problem(o: &Options) -> Result<(SeededGraph, Option<SbmParams>)> {
    let graph = io::read_edge_list(o.require(&o.graph, "graph")?)?;
    let seeds = io::read_labels(o.require(&o.seeds, "seeds")?)?;
    let params = o.params.as_deref().map(io::read_params).transpose()?;
    let k = match &params {
        Some(p) => p.num_blocks(),
        None => seeds.iter().map(|&(_, b)| b).max().ok_or(Error::NoSeeds)?,
    };
    let g = SeededGraph::new(graph, k, &seeds)?;
    Ok((g, params))
}

fn nominate_cmd(o: &Options) -> Result<()> {
    let scheme = o
        .scheme
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig("--scheme is required".into()))?;
    let (g, params) = load_problem(o)?;
    let model_params = |params: Option<SbmParams>| -> Result<SbmParams> {
        if o.estimate_params {
            nominate::estimate_params(&g)
        } else {
            params.ok_or_else(|| Error::InvalidConfig("--params or --estimate-params is required".into()))
        }
    };
    let list = match scheme {
        "lc" => nominate::nominate_lc_with(&g, &model_params(params)?, &CanonicalConfig::default())?,
        "lcs" => {
            let params = model_params(params)?;
            let mut cfg = McmcConfig::new(o.nmcmc.unwrap_or(10_000), o.seed());
            if let Some(b) = o.burn_in {
                cfg.burn_in = b;
            }
            if let Some(a) = o.audit_interval {
                cfg.audit_interval = a;
            }
            nominate::nominate_lcs(&g, &params, &cfg)?
        }
        "lp" | "lep" => spectral(o, &g, scheme == "lep")?,
        "random" => nominate::nominate_random(&g, o.seed()),
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown scheme '{other}' (expected lc, lcs, lp, lep or random)"
            )))
        }
    };
    emit(o.out.as_deref(), &io::format_nominations(&list))
}

fn spectral(o: &Options, g: &SeededGraph, extended: bool) -> Result<NominationList> {
    let dim = o.dim.ok_or_else(|| Error::InvalidConfig("--dim is required".into()))?;
    let emb: Embedding = adjacency_spectral_embed(g.graph(), dim)?;
    if let Some(path) = &o.dump_embedding {
        io::write_string(path, &io::format_embedding(&emb))?;
    }
    if let Some(path) = &o.dump_scree {
        let mut text = String::new();
        for s in emb.singular_values() {
            let _ = writeln!(text, "{s:e}");
        }
        io::write_string(path, &text)?;
    }
    if extended {
        let mut cfg = LepConfig::new(dim, o.max_k.unwrap_or(g.num_blocks()), o.seed());
        cfg.catalogue = o.catalogue()?;
        cfg.quasi_seeds = o.quasi_seeds;
        o.apply_lep_options(&mut cfg.likelihood, &mut cfg.ranking)?;
        let (list, selection) = nominate::nominate_lep_embedded(g, &emb, &cfg)?;
        if let Some(path) = &o.dump_fit {
            let json = serde_json::to_string_pretty(&selection.to_json()).expect("selection serializes");
            io::write_string(path, &json)?;
        }
        Ok(list)
    } else {
        let mut cfg = LpConfig::new(dim, o.k.unwrap_or(g.num_blocks()), o.seed());
        if let Some(r) = o.restarts {
            cfg.restarts = r;
        }
        nominate::nominate_lp_embedded(g, &emb, &cfg)
    }
}

fn evaluate(o: &Options) -> Result<()> {
    let list = io::read_nominations(o.require(&o.nominations, "nominations")?)?;
    let pairs = io::read_labels(o.require(&o.truth, "truth")?)?;
    let n = pairs.iter().map(|&(v, _)| v + 1).max().unwrap_or(0);
    let truth = io::truth_from_labels(&pairs, n)?;
    if let Some(path) = &o.seeds {
        let seeds = io::read_labels(path)?;
        let mut expected: Vec<usize> = (0..n).filter(|v| !seeds.iter().any(|&(s, _)| s == *v)).collect();
        expected.sort_unstable();
        if !list.is_permutation_of(&expected) {
            return Err(Error::VertexMismatch(
                "nominated vertices are not exactly the non-seed vertices".into(),
            ));
        }
    }
    let hits = eval::indicators(&list, &truth)?;
    let depth = hits.iter().filter(|&&h| h).count();
    let ap = eval::average_precision(&list, &truth)?;
    let mut text = format!("# average_precision {ap:.6}\n# depth {depth}\ndepth,precision\n");
    let mut found = 0usize;
    for (j, &h) in hits.iter().enumerate() {
        found += usize::from(h);
        let _ = writeln!(text, "{},{:.6}", j + 1, found as f64 / (j + 1) as f64);
    }
    emit(o.out.as_deref(), &text)
}

fn scaled(value: usize, factor: f64) -> usize {
    ((value as f64 / factor).round() as usize).max(1)
}

fn scaled_steps(value: u64, factor: f64) -> u64 {
    ((value as f64 / factor).round() as u64).max(2)
}

fn reproduce(target: &str, o: &Options) -> Result<()> {
    let f = o.scale_down()?;
    let seed = o.seed.unwrap_or(2018);
    let jobs = o.jobs.unwrap_or(0);
    let reports: Vec<ExperimentReport> = match target {
        "table3" => {
            let mut opts = Table3Options {
                rng_seed: seed,
                jobs,
                ..Table3Options::default()
            };
            if let Some(scale) = o.preset()? {
                opts.scales = vec![scale];
            }
            opts.replicates = o.replicates.unwrap_or(scaled(opts.replicates, f));
            opts.nmcmc = o.nmcmc.unwrap_or(scaled_steps(opts.nmcmc, f));
            table3(&opts)?
        }
        "table4-medium" | "table4-large" => {
            let scale = if target == "table4-medium" { Scale::Medium } else { Scale::Large };
            let mut opts = Table4Options::new(scale);
            opts.rng_seed = seed;
            opts.jobs = jobs;
            opts.replicates = o.replicates.unwrap_or(scaled(opts.replicates, f));
            opts.long_nmcmc = o.nmcmc.unwrap_or(scaled_steps(opts.long_nmcmc, f));
            opts.restarts = o.restarts.unwrap_or(opts.restarts);
            opts.dim = o.dim.unwrap_or(opts.dim);
            opts.k = o.k.unwrap_or(opts.k);
            opts.max_components = o.max_k.unwrap_or(opts.max_components);
            opts.catalogue = o.catalogue()?;
            o.apply_lep_options(&mut opts.likelihood, &mut opts.ranking)?;
            table4(&opts)?
        }
        "table5" => {
            let mut opts = Table5Options {
                rng_seed: seed,
                jobs,
                ..Table5Options::default()
            };
            if let Some(d) = o.dim {
                opts.dims = vec![d];
            }
            opts.replicates = o.replicates.unwrap_or(scaled(opts.replicates, f));
            opts.max_components = o.max_k.unwrap_or(opts.max_components);
            opts.catalogue = o.catalogue()?;
            o.apply_lep_options(&mut opts.likelihood, &mut opts.ranking)?;
            opts.burn_in = o.burn_in.unwrap_or(opts.burn_in);
            table5(&opts)?.into_iter().flat_map(|(_, r)| r).collect()
        }
        "fig5" => {
            let mut opts = NmcmcSweepOptions::new(o.preset()?.unwrap_or(Scale::Medium));
            opts.rng_seed = seed;
            opts.jobs = jobs;
            opts.replicates = o.replicates.unwrap_or(scaled(opts.replicates, f));
            if let Some(cap) = o.nmcmc {
                opts.steps.retain(|&s| s <= cap);
            }
            table_steps(&mut opts.steps, f);
            nmcmc_sweep(&opts)?
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown target '{other}' (expected table3, table4-medium, table4-large, table5 or fig5)"
            )))
        }
    };
    eprint!("{}", format_reports(&reports));
    emit(o.out.as_deref(), &reports_to_csv(&reports))
}

fn table_steps(steps: &mut [u64], factor: f64) {
    for s in steps.iter_mut() {
        *s = scaled_steps(*s, factor);
    }
}
