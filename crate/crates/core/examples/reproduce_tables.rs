//! Scaled-down runs of the preset experiments: exact versus sampled on the
//! small scales, and the four schemes on the medium scale.
//!
//! cargo run --example reproduce_tables

use vertex_nomination::eval::{format_reports, table3, table4, Table3Options, Table4Options};
use vertex_nomination::presets::Scale;

fn main() -> vertex_nomination::Result<()> {
    let small = Table3Options {
        scales: vec![Scale::SmallSmall, Scale::MediumSmall],
        replicates: 200,
        ..Table3Options::default()
    };
    print!("{}", format_reports(&table3(&small)?));

    let mut medium = Table4Options::new(Scale::Medium);
    medium.replicates = 5;
    medium.restarts = 100;
    println!();
    print!("{}", format_reports(&table4(&medium)?));
    Ok(())
}
