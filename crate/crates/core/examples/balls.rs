//! Compares radius-1 balls of a sequential graph with limit trees.

use pagen::cli::compare_balls;
use pagen::growth::generate_sequential;
use pagen::localview::{build_exploration_tree, extract_ball, BallKind};
use pagen::{ModelParams, SeedSpec};

fn main() -> pagen::Result<()> {
    let params = ModelParams::new(2, 0.0)?;
    for n in [1_000, 20_000] {
        let g = generate_sequential(&params, n, &mut SeedSpec::new(9).rng())?;
        let (report, graph_dist, _) = compare_balls(&g, BallKind::Hat, 1, 20_000, 10)?;
        println!("n={n}: TV={:.4} over {} classes", report.tv, graph_dist.counts.len());
    }
    let g = generate_sequential(&params, 500, &mut SeedSpec::new(1).rng())?;
    let ball = extract_ball(&g, 250, 2)?;
    let tree = build_exploration_tree(&g, 250, 2)?;
    println!(
        "vertex 250: ball has {} vertices, tree-like {}, exploration injective {}",
        ball.len(),
        ball.is_tree(),
        tree.is_injective()
    );
    Ok(())
}
