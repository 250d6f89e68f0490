//! Counts a pattern in a graph and compares with its limiting frequency.

use pagen::growth::generate_sequential;
use pagen::subgraph::{count_inj, estimate_t_hat_mc, t_hat_quadrature, SubgraphPattern};
use pagen::{ModelParams, SeedSpec};

fn main() -> pagen::Result<()> {
    let params = ModelParams::new(2, 0.0)?;
    // A degree-2 vertex attached to a degree-3 vertex.
    let pattern = SubgraphPattern::new(2, &[(1, 2, 1)], &[1, 2])?;
    let n = 50_000;
    let g = generate_sequential(&params, n, &mut SeedSpec::new(2).rng())?;
    let count = count_inj(&pattern, &g);
    let mc = estimate_t_hat_mc(&pattern, &params, 100_000, &mut SeedSpec::new(3).rng())?;
    let quad = t_hat_quadrature(&pattern, &params)?;
    println!("count/n = {:.5}", count as f64 / n as f64);
    println!("t_hat Monte Carlo = {:.5} (se {:.5})", mc.estimate, mc.std_error);
    println!("t_hat quadrature = {quad:.5}");
    Ok(())
}
