//! Metropolis-Hastings estimate of the posterior at growing chain lengths,
//! checked against exact enumeration on a small graph.
//!
//! cargo run --example mcmc_sampling

use std::time::Instant;

use vertex_nomination::canonical::enumerate_posterior;
use vertex_nomination::eval::{average_precision, Protocol};
use vertex_nomination::mcmc::{cs_nominate, run_chain, McmcConfig};
use vertex_nomination::presets::Scale;

fn main() -> vertex_nomination::Result<()> {
    let setup = Scale::LargeSmall.setup();
    let (g, truth) = Protocol::from_setup(&setup).replicate(11, 0)?;
    let exact = enumerate_posterior(&g, &setup.params)?;
    println!("steps       max|q̂-q|  acceptance  AP      seconds");
    for steps in [1_000u64, 10_000, 100_000, 1_000_000] {
        let start = Instant::now();
        let est = run_chain(&g, &setup.params, &McmcConfig::new(steps, 5))?;
        let secs = start.elapsed().as_secs_f64();
        let err = exact
            .probs()
            .iter()
            .zip(est.probs())
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        let ap = average_precision(&cs_nominate(&est), &truth)?;
        println!("{steps:<11} {err:<9.4} {:<11.3} {ap:<7.4} {secs:.4}", est.acceptance_rate());
    }
    Ok(())
}
