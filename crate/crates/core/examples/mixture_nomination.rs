//! Extended spectral nomination: semi-supervised Gaussian mixtures over the
//! covariance catalogue, selected by BIC′, with the full candidate table.
//!
//! cargo run --example mixture_nomination

use vertex_nomination::eval::{average_precision, Protocol};
use vertex_nomination::nominate::{nominate_lep_detailed, LepConfig, LepRanking};
use vertex_nomination::presets::Scale;

fn main() -> vertex_nomination::Result<()> {
    let (g, truth) = Protocol::from_setup(&Scale::Medium.setup()).replicate(9, 0)?;
    let cfg = LepConfig::new(3, 4, 0);
    let (list, selection) = nominate_lep_detailed(&g, &cfg)?;

    println!("K  model  params  BIC′");
    for c in &selection.candidates {
        match c.bic_prime {
            Some(b) => println!("{}  {}    {:>4}    {b:.1}", c.components, c.covariance_model, c.num_params),
            None => println!("{}  {}    failed: {}", c.components, c.covariance_model, c.error.as_deref().unwrap_or("?")),
        }
    }
    let best = &selection.best;
    println!(
        "selected K = {} {} with weights {:.3?}",
        best.num_components(),
        best.covariance_model(),
        best.weights()
    );
    println!("AP, posterior ranking: {:.4}", average_precision(&list, &truth)?);

    let density = LepConfig {
        ranking: LepRanking::Density,
        ..cfg
    };
    let (list, _) = nominate_lep_detailed(&g, &density)?;
    println!("AP, density ranking:   {:.4}", average_precision(&list, &truth)?);
    Ok(())
}
