//! Adjacency spectral embedding of a medium-scale graph: scree, suggested
//! dimension, and per-block centroids of the embedded points.
//!
//! cargo run --example spectral_embedding

use vertex_nomination::embed::{adjacency_spectral_embed, scree_elbow};
use vertex_nomination::eval::Protocol;
use vertex_nomination::presets::Scale;

fn main() -> vertex_nomination::Result<()> {
    let setup = Scale::Medium.setup();
    let (g, truth) = Protocol::from_setup(&setup).replicate(1, 0)?;
    let emb = adjacency_spectral_embed(g.graph(), 8)?;
    println!("top singular values: {:.2?}", emb.singular_values());
    println!("signed eigenvalues:  {:.2?}", emb.eigenvalues());
    println!("scree elbow suggests dimension {}", scree_elbow(emb.singular_values())?);

    let emb = emb.truncate(3)?;
    for block in 1..=setup.params.num_blocks() {
        let members: Vec<usize> = (0..g.num_vertices()).filter(|&v| truth.label(v) == block).collect();
        let centroid: Vec<f64> = (0..3)
            .map(|j| members.iter().map(|&v| emb.coords()[(v, j)]).sum::<f64>() / members.len() as f64)
            .collect();
        println!("block {block}: {} vertices, centroid {centroid:.3?}", members.len());
    }
    Ok(())
}
