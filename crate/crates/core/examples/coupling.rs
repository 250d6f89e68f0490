//! Couples the sequential and independent rules and tracks disagreement.

use pagen::growth::generate_coupled;
use pagen::{ModelParams, SeedSpec};

fn main() -> pagen::Result<()> {
    let params = ModelParams::new(2, 0.0)?;
    for n in [1_000, 10_000] {
        let pair = generate_coupled(&params, n, &mut SeedSpec::new(6).rng())?;
        println!(
            "n={n}: {} discrepant vertices, late-vertex mismatch {:.4}, approximate={}",
            pair.discrepancies.len(),
            pair.received_mismatch_fraction(n / 2),
            pair.approximate
        );
    }
    let pair = generate_coupled(&params, 40, &mut SeedSpec::new(7).rng())?;
    println!("{}", pair.report_json());
    Ok(())
}
