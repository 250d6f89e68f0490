//! Builds an urn state and compares positions with `(k/n)^chi`.

use pagen::urn::{build_urn_state, generate_polya_with_state};
use pagen::{ModelParams, SeedSpec};

fn main() -> pagen::Result<()> {
    let params = ModelParams::new(2, 0.5)?;
    let n = 100_000;
    let state = build_urn_state(&params, n, &mut SeedSpec::new(3).rng())?;
    println!("k\tS_k\t(k/n)^chi");
    for k in [10, 100, 1_000, 10_000, n] {
        println!("{k}\t{:.5}\t{:.5}", state.s(k), (k as f64 / n as f64).powf(params.chi()));
    }
    let (g, _) = generate_polya_with_state(&params, 1_000, &mut SeedSpec::new(4).rng())?;
    println!("degree of vertex 1 in a 1000-vertex urn graph: {}", g.degree(1)?);
    Ok(())
}
