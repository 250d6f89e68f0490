//! Step-by-step generators for the three attachment rules.
//!
//! Vertex `t >= 3` picks targets among `1..t-1`. With probability `alpha` a
//! slot attaches uniformly, otherwise proportionally to the degree in
//! `G_{t-1}`, whose total is `Z = 2m(t - 2)`.

mod coupling;

pub use coupling::{
    generate_coupled, maximal_coupling, CoupledPair, CouplingLaw, Discrepancy, EXACT_SUPPORT_LIMIT,
};

use rand::Rng;

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::graph::{ModelTag, PaGraph};
use crate::params::ModelParams;

/// Rejection attempts allowed per vertex in the conditional model.
pub const CONDITIONAL_MAX_ATTEMPTS: u64 = 1_000_000;

/// Running degrees of a graph under construction, with a cumulative tree
/// for degree-proportional draws.
#[derive(Debug, Clone)]
pub(crate) struct DegreeState {
    pub(crate) deg: Vec<u64>,
    pub(crate) tree: Fenwick,
}

impl DegreeState {
    pub(crate) fn new(n: usize) -> Self {
        DegreeState {
            deg: vec![0; n],
            tree: Fenwick::new(n),
        }
    }

    pub(crate) fn bump(&mut self, v: usize, by: u64) {
        self.deg[v - 1] += by;
        self.tree.add(v - 1, by);
    }

    /// Degree-proportional draw (1-based).
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.tree.sample(rng) + 1
    }

    pub(crate) fn degree(&self, v: usize) -> u64 {
        self.deg[v - 1]
    }
}

/// Uniform-mixing weight of slot `i` of vertex `t` in the sequential rule:
/// `alpha * 2m(t-1) / (2m(t-2) + 2m alpha + (1 - alpha)(i - 1))`.
pub fn sequential_mixing(params: &ModelParams, t: usize, i: usize) -> f64 {
    let alpha = params.alpha();
    if alpha == 0.0 {
        return 0.0;
    }
    let m = params.m() as f64;
    let t = t as f64;
    let i = i as f64;
    alpha * 2.0 * m * (t - 1.0) / (2.0 * m * (t - 2.0) + 2.0 * m * alpha + (1.0 - alpha) * (i - 1.0))
}

/// Probability that slot `i` of vertex `t` attaches to a vertex whose running
/// degree (including earlier slots of `t`) is `d`.
pub fn sequential_slot_prob(params: &ModelParams, t: usize, i: usize, d: u64) -> f64 {
    let mix = sequential_mixing(params, t, i);
    let z = (2 * params.m() * (t - 2) + i - 1) as f64;
    mix / (t - 1) as f64 + (1.0 - mix) * d as f64 / z
}

/// Probability that an independent slot of vertex `t` attaches to a vertex of
/// degree `d` in `G_{t-1}`.
pub fn independent_slot_prob(params: &ModelParams, t: usize, d: u64) -> f64 {
    let alpha = params.alpha();
    let z = (2 * params.m() * (t - 2)) as f64;
    alpha / (t - 1) as f64 + (1.0 - alpha) * d as f64 / z
}

fn check_size(params: &ModelParams, n: usize) -> Result<()> {
    params.check_graph_model()?;
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    if n > u32::MAX as usize {
        return Err(Error::invalid("n exceeds u32 range"));
    }
    Ok(())
}

/// Starts a graph at `G_2`: vertex 2 sends all `m` edges to vertex 1.
fn start(params: &ModelParams, n: usize) -> (Vec<u32>, DegreeState) {
    let m = params.m();
    let mut targets = Vec::with_capacity(m * (n - 1));
    targets.extend(std::iter::repeat_n(1u32, m));
    let mut ds = DegreeState::new(n);
    ds.bump(1, m as u64);
    ds.bump(2, m as u64);
    (targets, ds)
}

pub(crate) fn draw_independent<R: Rng + ?Sized>(
    params: &ModelParams,
    t: usize,
    ds: &DegreeState,
    rng: &mut R,
) -> usize {
    if params.alpha() > 0.0 && rng.random::<f64>() < params.alpha() {
        rng.random_range(1..t)
    } else {
        ds.sample(rng)
    }
}

pub(crate) fn draw_sequential<R: Rng + ?Sized>(
    params: &ModelParams,
    t: usize,
    i: usize,
    ds: &DegreeState,
    rng: &mut R,
) -> usize {
    let mix = sequential_mixing(params, t, i);
    if mix > 0.0 && rng.random::<f64>() < mix {
        rng.random_range(1..t)
    } else {
        ds.sample(rng)
    }
}

/// Independent model: the `m` slots of each vertex are i.i.d. given the past.
pub fn generate_independent<R: Rng + ?Sized>(params: &ModelParams, n: usize, rng: &mut R) -> Result<PaGraph> {
    check_size(params, n)?;
    let m = params.m();
    let (mut targets, mut ds) = start(params, n);
    let mut picks = vec![0usize; m];
    for t in 3..=n {
        for p in picks.iter_mut() {
            *p = draw_independent(params, t, &ds, rng);
        }
        for &w in &picks {
            targets.push(w as u32);
            ds.bump(w, 1);
        }
        ds.bump(t, m as u64);
    }
    Ok(PaGraph::from_raw(*params, n, ModelTag::Independent, targets))
}

/// Sequential model: slot `i` sees the degrees updated by slots `1..i-1` and
/// the adjusted uniform weight from [`sequential_mixing`].
pub fn generate_sequential<R: Rng + ?Sized>(params: &ModelParams, n: usize, rng: &mut R) -> Result<PaGraph> {
    check_size(params, n)?;
    let m = params.m();
    let (mut targets, mut ds) = start(params, n);
    for t in 3..=n {
        for i in 1..=m {
            let w = draw_sequential(params, t, i, &ds, rng);
            targets.push(w as u32);
            ds.bump(w, 1);
        }
        ds.bump(t, m as u64);
    }
    Ok(PaGraph::from_raw(*params, n, ModelTag::Sequential, targets))
}

/// Default start of the conditional model on vertices `1..=m+1`: vertex `k`
/// sends its `m` slots round-robin to `1, 2, ..., k-1, 1, 2, ...`. Vertex 2
/// thus sends every slot to 1, vertex `m + 1` reaches each of `1..=m` once,
/// and the underlying simple graph is complete.
pub fn default_conditional_seed(params: &ModelParams) -> Result<PaGraph> {
    params.check_graph_model()?;
    let m = params.m();
    let mut targets = Vec::with_capacity(m * m);
    for k in 2..=m + 1 {
        for i in 0..m {
            targets.push((i % (k - 1) + 1) as u32);
        }
    }
    PaGraph::from_targets(*params, m + 1, ModelTag::Conditional, targets)
}

/// Conditional model: the independent rule, resampled as a block until the
/// `m` targets are pairwise distinct. `seed_graph` fixes vertices `1..=m+1`.
pub fn generate_conditional<R: Rng + ?Sized>(
    params: &ModelParams,
    n: usize,
    rng: &mut R,
    seed_graph: Option<&PaGraph>,
) -> Result<PaGraph> {
    check_size(params, n)?;
    let m = params.m();
    if n <= m + 1 {
        return Err(Error::invalid(format!("conditional model needs n > m + 1 = {}", m + 1)));
    }
    let default_seed;
    let seed_graph = match seed_graph {
        Some(g) => g,
        None => {
            default_seed = default_conditional_seed(params)?;
            &default_seed
        }
    };
    if seed_graph.n() != m + 1 || seed_graph.m() != m {
        return Err(Error::invalid(format!(
            "seed graph must have {} vertices and m = {m}",
            m + 1
        )));
    }
    let mut targets = Vec::with_capacity(m * (n - 1));
    targets.extend_from_slice(seed_graph.targets());
    let mut ds = DegreeState::new(n);
    for (v, d) in seed_graph.degrees().into_iter().enumerate() {
        ds.bump(v + 1, d as u64);
    }
    let mut picks = vec![0usize; m];
    for t in m + 2..=n {
        let mut attempts = 0u64;
        loop {
            attempts += 1;
            for p in picks.iter_mut() {
                *p = draw_independent(params, t, &ds, rng);
            }
            let distinct = (1..m).all(|i| !picks[..i].contains(&picks[i]));
            if distinct {
                break;
            }
            if attempts >= CONDITIONAL_MAX_ATTEMPTS {
                return Err(Error::RejectionLimit { vertex: t, attempts });
            }
        }
        for &w in &picks {
            targets.push(w as u32);
            ds.bump(w, 1);
        }
        ds.bump(t, m as u64);
    }
    Ok(PaGraph::from_raw(*params, n, ModelTag::Conditional, targets))
}

/// Dispatches on the model tag. The conditional model uses the default seed.
pub fn generate<R: Rng + ?Sized>(model: ModelTag, params: &ModelParams, n: usize, rng: &mut R) -> Result<PaGraph> {
    match model {
        ModelTag::Independent => generate_independent(params, n, rng),
        ModelTag::Conditional => generate_conditional(params, n, rng, None),
        ModelTag::Sequential => generate_sequential(params, n, rng),
        ModelTag::Polya => crate::urn::generate_polya(params, n, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSpec;

    fn p(m: usize, alpha: f64) -> ModelParams {
        ModelParams::new(m, alpha).unwrap()
    }

    #[test]
    fn mixing_weight() {
        assert_eq!(sequential_mixing(&p(2, 0.0), 10, 2), 0.0);
        // Slot 1 probabilities sum to one.
        let params = p(3, 0.4);
        let t = 7;
        let degs = [5u64, 7, 3, 3, 6, 6];
        assert_eq!(degs.iter().sum::<u64>(), (2 * 3 * (t - 2)) as u64);
        let s: f64 = degs.iter().map(|&d| sequential_slot_prob(&params, t, 1, d)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        // Slot 3 after two picks: total degree grows by two.
        let mut d2 = degs;
        d2[0] += 1;
        d2[4] += 1;
        let s: f64 = d2.iter().map(|&d| sequential_slot_prob(&params, t, 3, d)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n2_forced_everywhere() {
        let params = p(3, 0.3);
        for g in [
            generate_independent(&params, 2, &mut SeedSpec::new(1).rng()).unwrap(),
            generate_sequential(&params, 2, &mut SeedSpec::new(1).rng()).unwrap(),
        ] {
            assert_eq!(g.sends(2), &[1, 1, 1]);
        }
    }

    #[test]
    fn independent_third_vertex_is_fair_coin() {
        let params = p(2, 0.0);
        let mut rng = SeedSpec::new(3).rng();
        let runs = 100_000;
        let mut ones = 0;
        for _ in 0..runs {
            let g = generate_independent(&params, 3, &mut rng).unwrap();
            ones += g.sends(3).iter().filter(|&&w| w == 1).count();
        }
        let f = ones as f64 / (2 * runs) as f64;
        assert!((f - 0.5).abs() < 0.005, "{f}");
    }

    #[test]
    fn sequential_second_slot_follows_updated_degree() {
        // n = 3, m = 2, alpha = 0: given w_1 = 2, P(w_2 = 2) = 3 / 5.
        let params = p(2, 0.0);
        let mut rng = SeedSpec::new(4).rng();
        let mut cond = 0u64;
        let mut hit = 0u64;
        while cond < 1_000_000 {
            let g = generate_sequential(&params, 3, &mut rng).unwrap();
            if g.sends(3)[0] == 2 {
                cond += 1;
                if g.sends(3)[1] == 2 {
                    hit += 1;
                }
            }
        }
        let f = hit as f64 / cond as f64;
        assert!((f - 0.6).abs() < 0.002, "{f}");
        assert!((sequential_slot_prob(&params, 3, 2, 3) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn conditional_targets_distinct() {
        let params = p(3, 0.2);
        let seed = default_conditional_seed(&params).unwrap();
        assert_eq!(seed.sends(2), &[1, 1, 1]);
        assert_eq!(seed.sends(3), &[1, 2, 1]);
        assert_eq!(seed.sends(4), &[1, 2, 3]);
        let g = generate_conditional(&params, 2000, &mut SeedSpec::new(8).rng(), None).unwrap();
        for v in params.m() + 2..=g.n() {
            let s = g.sends(v);
            assert!(s[0] != s[1] && s[1] != s[2] && s[0] != s[2]);
        }
        assert!(generate_conditional(&params, 4, &mut SeedSpec::new(8).rng(), None).is_err());
    }

    #[test]
    fn invariants_all_models() {
        for model in [ModelTag::Independent, ModelTag::Conditional, ModelTag::Sequential, ModelTag::Polya] {
            for &alpha in &[0.0, 0.5] {
                let params = p(3, alpha);
                let g = generate(model, &params, 500, &mut SeedSpec::new(2).rng()).unwrap();
                let total: u64 = g.degrees().iter().map(|&d| d as u64).sum();
                assert_eq!(total, 2 * 3 * 499);
                for (s, w, _) in g.edges() {
                    assert!(w < s);
                }
                let again = generate(model, &params, 500, &mut SeedSpec::new(2).rng()).unwrap();
                assert_eq!(g, again);
            }
        }
    }
}
