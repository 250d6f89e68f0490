//! The F_k limit and the coupling map f_k.

use pagen::analytics::{coupling_map_fk, estimate_fk, fk_mean_exact, FkSampler};
use pagen::{ModelParams, SeedSpec};

fn main() -> pagen::Result<()> {
    let params = ModelParams::new(2, 0.0)?;
    let mut rng = SeedSpec::new(8).rng();
    let (k, ell) = (50, 100_000);
    let sampler = FkSampler::new(&params, k, ell, FkSampler::DEFAULT_WINDOW)?;
    let draws = 20_000;
    let mean = (0..draws).map(|_| sampler.sample(&mut rng)).sum::<f64>() / draws as f64;
    println!("F_{k}: mean {mean:.4}, exact {:.4}", fk_mean_exact(&params, k, ell)?);
    println!("one exact draw: {:.4}", estimate_fk(&params, k, 5_000, &mut rng)?);
    let k = 10_000;
    for x in [0.1, 1.0, (k as f64).ln().powi(2)] {
        let f = coupling_map_fk(&params, k, x)?;
        let scale = x / (2.0 * params.m() as f64 * k as f64 * (1.0 + params.u()));
        println!("f_k({x:.3}) / bracket centre = {:.5}", f / scale);
    }
    Ok(())
}
