//! Spectral partitioning: k-means on the embedding, ranked by distance to the
//! cluster that holds the block-1 seeds. Shows the effect of k-means restarts.
//!
//! cargo run --example spectral_partition

use std::time::Instant;

use vertex_nomination::eval::{average_precision, Protocol};
use vertex_nomination::nominate::{nominate_lp, LpConfig};
use vertex_nomination::presets::Scale;

fn main() -> vertex_nomination::Result<()> {
    let protocol = Protocol::from_setup(&Scale::Medium.setup());
    println!("restarts  mean AP over 5 graphs  seconds");
    for restarts in [1, 10, 100] {
        let start = Instant::now();
        let mut total = 0.0;
        for r in 0..5 {
            let (g, truth) = protocol.replicate(42, r)?;
            let mut cfg = LpConfig::new(3, 3, r as u64);
            cfg.restarts = restarts;
            total += average_precision(&nominate_lp(&g, &cfg)?, &truth)?;
        }
        println!("{restarts:<9} {:<22.4} {:.2}", total / 5.0, start.elapsed().as_secs_f64());
    }
    Ok(())
}
