//! Exact block-1 posterior by enumerating every admissible assignment, then
//! the canonical list and its average precision.
//!
//! cargo run --example canonical_posterior

use vertex_nomination::canonical::{canonical_nominate, count_assignments, enumerate_posterior};
use vertex_nomination::eval::{average_precision, Protocol};
use vertex_nomination::presets::Scale;

fn main() -> vertex_nomination::Result<()> {
    let setup = Scale::MediumSmall.setup();
    let (g, truth) = Protocol::from_setup(&setup).replicate(3, 0)?;
    let sizes = g.ambiguous_block_sizes(setup.params.block_sizes())?;
    println!("ambiguous block sizes {sizes:?}: {} assignments", count_assignments(&sizes));

    let posterior = enumerate_posterior(&g, &setup.params)?;
    println!("sum of posteriors {:.6} (block 1 has {} ambiguous vertices)", posterior.total(), sizes[0]);

    let list = canonical_nominate(&posterior);
    println!("rank vertex posterior truth");
    for (rank, &v) in list.vertices().iter().enumerate() {
        println!("{:>4} {v:>6} {:>9.4} {:>5}", rank + 1, posterior.get(v).unwrap(), truth.label(v));
    }
    println!("average precision {:.4}", average_precision(&list, &truth)?);
    Ok(())
}
