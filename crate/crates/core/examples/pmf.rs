//! Degree and neighbor-degree laws, plus a slice of the joint law.

use pagen::analytics::{conditional_neighbor_degree, degree_dist_pmf, joint_degree_pmf, neighbor_degree_dist_pmf};
use pagen::ModelParams;

fn main() -> pagen::Result<()> {
    for alpha in [0.0, 0.5] {
        let params = ModelParams::new(2, alpha)?;
        let d = degree_dist_pmf(&params, 10_000);
        let dn = neighbor_degree_dist_pmf(&params, 10_000);
        println!("alpha={alpha}: total mass D={:.12} D'={:.12}", d.total(), dn.total());
        println!("  P(D=2..5) = {:?}", (2..6).map(|k| d.prob(k)).collect::<Vec<_>>());
        println!("  P(D=2, D'=3) = {:.6}", joint_degree_pmf(&params, 0, 0)?);
        println!("  P(D'=13 | D=4) = {:.6e}", conditional_neighbor_degree(&params, 2, 10)?);
    }
    let params = ModelParams::new(2, 0.0)?;
    degree_dist_pmf(&params, 5).write_tsv(std::io::stdout())
}
