//! Sample a seeded SBM graph from a named preset and print a summary.
//!
//! cargo run --example generate_graph -- medium 7

use vertex_nomination::eval::Protocol;
use vertex_nomination::io::format_edge_list;
use vertex_nomination::presets::Scale;

fn main() -> vertex_nomination::Result<()> {
    let mut args = std::env::args().skip(1);
    let scale: Scale = args.next().unwrap_or_else(|| "small-small".into()).parse()?;
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed is an integer"));

    let setup = scale.setup();
    let (g, truth) = Protocol::from_setup(&setup).replicate(seed, 0)?;
    println!("scale {scale}: block sizes {:?}", setup.params.block_sizes());
    println!("bernoulli matrix:{}", setup.params.bernoulli());
    println!(
        "{} vertices, {} edges, {} seeds, {} ambiguous",
        g.num_vertices(),
        g.graph().num_edges(),
        g.seeds().len(),
        g.ambiguous().len()
    );
    let interest = g.ambiguous().iter().filter(|&&v| truth.in_interest_block(v)).count();
    println!("ambiguous vertices in block 1: {interest}");
    let text = format_edge_list(g.graph());
    println!("first lines of the edge list:");
    for line in text.lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}
