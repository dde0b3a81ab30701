//! Monte Carlo comparison of every scheme on the small-small scale: MAP with
//! standard errors and the precision curve by list position.
//!
//! cargo run --example evaluate_schemes

use vertex_nomination::canonical::CanonicalConfig;
use vertex_nomination::eval::{format_reports, run_experiment, BurnIn, ExperimentConfig, Protocol, SchemeRun, SchemeSpec};
use vertex_nomination::nominate::{LepConfig, LpConfig};
use vertex_nomination::presets::Scale;

fn main() -> vertex_nomination::Result<()> {
    let protocol = Protocol::from_setup(&Scale::SmallSmall.setup());
    let mut lp = LpConfig::new(2, 3, 0);
    lp.restarts = 50;
    let schemes = [
        SchemeRun::new("lc", SchemeSpec::Canonical(CanonicalConfig::default())),
        SchemeRun::new(
            "lcs",
            SchemeSpec::Sampling {
                steps: 10_000,
                burn_in: BurnIn::Half,
                estimate_params: false,
            },
        ),
        SchemeRun::new("lp", SchemeSpec::Spectral(lp)),
        SchemeRun::new("lep", SchemeSpec::Extended(LepConfig::new(2, 3, 0))),
        SchemeRun::new("random", SchemeSpec::Random),
    ];
    let reports = run_experiment(&protocol, &schemes, &ExperimentConfig::new(200, 1))?;
    print!("{}", format_reports(&reports));
    println!("\nprecision by list position:");
    for r in &reports {
        let curve: Vec<String> = r.curve.probs().iter().map(|p| format!("{p:.2}")).collect();
        println!("{:<7} {}", r.label, curve.join(" "));
    }
    Ok(())
}
