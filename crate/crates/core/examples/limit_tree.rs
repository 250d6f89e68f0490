//! Samples a Pólya-point tree and checks the root degree law.

use pagen::analytics::degree_prob;
use pagen::limit::{root_degree_pmf_empirical, sample_tree, DEFAULT_MAX_NODES};
use pagen::{ModelParams, SeedSpec};

fn main() -> pagen::Result<()> {
    let params = ModelParams::new(2, 0.0)?;
    let mut rng = SeedSpec::new(5).rng();
    let tree = sample_tree(&params, 2, DEFAULT_MAX_NODES, &mut rng);
    println!("radius-2 tree: {} nodes, root degree {}", tree.len(), tree.root().degree());
    println!("{}", serde_json::to_string(&tree.to_json()["nodes"][0])?);

    let hist = root_degree_pmf_empirical(&params, 200_000, &mut rng);
    println!("k\tsampled\texact");
    for q in 0..5 {
        println!("{}\t{:.4}\t{:.4}", params.m() + q, hist.freq(params.m() + q), degree_prob(&params, q));
    }
    Ok(())
}
