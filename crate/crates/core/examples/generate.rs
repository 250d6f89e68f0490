//! Grows one graph with each rule and prints degree summaries.

use pagen::growth::generate;
use pagen::{ModelParams, ModelTag, SeedSpec};

fn main() -> pagen::Result<()> {
    let params = ModelParams::new(2, 0.25)?;
    let n = 20_000;
    for model in [ModelTag::Independent, ModelTag::Conditional, ModelTag::Sequential, ModelTag::Polya] {
        let g = generate(model, &params, n, &mut SeedSpec::new(11).rng())?;
        let hist = g.degree_histogram();
        let max = hist.len() - 1;
        let share_min = hist[2] as f64 / n as f64;
        println!("{model:>12}: edges={} max_degree={max} P(D=m)={share_min:.4}", g.edge_count());
    }
    Ok(())
}
