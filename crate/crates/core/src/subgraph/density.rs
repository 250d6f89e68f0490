//! Limiting frequency `t(F, n) = E[inj((F, v_1), n; (T, 0))]` of a tree
//! pattern, by Monte Carlo over limit trees or by integrating the density of
//! positions and strengths of the pattern's image.
//!
//! Hang the pattern from `v_1` and place vertex `i` at `x_i` with strength
//! `gamma_i`. Children of `v_i` to the left of `x_i` form `L(v_i)`, those to
//! the right `R(v_i)`. A node has `m_-` left children (`m` for the root and
//! left nodes, `m - 1` for right nodes), so
//!
//! ```text
//! n'(i) = d_F(v_i) + n(i) - m_-(i) - [i != 1] - |R(v_i)|
//! p = (psi+1) x_1^psi prod_i [ e^-H_i H_i^n'(i) / n'(i)!
//!       * (m_-(i))_|L(v_i)| x_i^-|L(v_i)|
//!       * prod_{j in R(v_i)} gamma_i psi x_j^(psi-1) / x_i^psi ]
//! ```
//!
//! with `H_i = gamma_i (1 - x_i^psi) / x_i^psi` and the falling factorial
//! `(m_-)_l` counting the ordered choices of left children.

use rand::Rng;
use serde::Serialize;

use super::{count_inj_rooted, SubgraphPattern, TreeHost};
use crate::error::{Error, Result};
use crate::limit::sample_tree;
use crate::params::ModelParams;
use crate::quadrature::{integrate, Tolerance};
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    /// Trees dropped for hitting the node cap.
    pub excluded: u64,
}

/// Node cap for the trees used by [`estimate_t_hat_mc`].
const MC_MAX_NODES: usize = 100_000;

pub fn estimate_t_hat_mc<R: Rng + ?Sized>(
    pattern: &SubgraphPattern,
    params: &ModelParams,
    samples: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    if !pattern.is_tree() {
        return Ok(MonteCarloEstimate {
            estimate: 0.0,
            std_error: 0.0,
            samples: 0,
            excluded: 0,
        });
    }
    let radius = pattern.depth();
    let (mut sum, mut sq, mut used, mut excluded) = (0.0, 0.0, 0u64, 0u64);
    for _ in 0..samples {
        let tree = sample_tree(params, radius, MC_MAX_NODES, rng);
        let host = match tree.truncated {
            false => TreeHost::with_boundary_degrees(&tree, params, rng),
            true => None,
        };
        let Some(host) = host else {
            excluded += 1;
            continue;
        };
        let c = count_inj_rooted(pattern, &host, 0) as f64;
        sum += c;
        sq += c * c;
        used += 1;
    }
    if used == 0 {
        return Err(Error::Numeric("every sampled tree was truncated".into()));
    }
    let mean = sum / used as f64;
    let var = if used > 1 {
        ((sq - used as f64 * mean * mean) / (used - 1) as f64).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        estimate: mean,
        std_error: (var / used as f64).sqrt(),
        samples: used,
        excluded,
    })
}

/// Per-vertex bookkeeping for given positions.
struct Layout {
    left: Vec<usize>,
    right: Vec<usize>,
    /// `m_-`, the left-child count of the node type.
    m_minus: Vec<usize>,
    is_left: Vec<bool>,
    n_prime: Vec<Option<usize>>,
}

fn layout(pattern: &SubgraphPattern, m: usize, x: &[f64]) -> Layout {
    let k = pattern.vertex_count();
    let (parent, children) = pattern.rooted_tree();
    let mut out = Layout {
        left: vec![0; k],
        right: vec![0; k],
        m_minus: vec![m; k],
        is_left: vec![false; k],
        n_prime: vec![None; k],
    };
    for i in 0..k {
        for &c in &children[i] {
            if x[c] < x[i] {
                out.left[i] += 1;
            } else {
                out.right[i] += 1;
            }
        }
        if let Some(p) = parent[i] {
            out.is_left[i] = x[i] < x[p];
            out.m_minus[i] = if out.is_left[i] { m } else { m - 1 };
        }
    }
    for i in 0..k {
        let need = out.m_minus[i] + usize::from(parent[i].is_some()) + out.right[i];
        out.n_prime[i] = pattern.target_degree(i).checked_sub(need);
    }
    out
}

fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        0.0
    } else {
        (0..k).map(|i| (n - i) as f64).product()
    }
}

fn check_tree_pattern(pattern: &SubgraphPattern, params: &ModelParams) -> Result<()> {
    if !pattern.is_tree() {
        return Err(Error::invalid("density needs a tree pattern"));
    }
    params.check_graph_model()
}

/// The density `p(F, n, x, gamma)` for positions consistent with the total
/// order `theta` (`theta[i]` is the rank of `v_{i+1}`).
pub fn eval_density(
    pattern: &SubgraphPattern,
    params: &ModelParams,
    x: &[f64],
    gamma: &[f64],
    theta: &[usize],
) -> Result<f64> {
    check_tree_pattern(pattern, params)?;
    let k = pattern.vertex_count();
    if x.len() != k || gamma.len() != k || theta.len() != k {
        return Err(Error::invalid("x, gamma and theta need one entry per pattern vertex"));
    }
    let mut ranks = theta.to_vec();
    ranks.sort_unstable();
    if ranks != (0..k).collect::<Vec<_>>() {
        return Err(Error::invalid("theta must be a permutation of 0..k"));
    }
    if x.iter().any(|&v| !(v > 0.0 && v <= 1.0)) || gamma.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::invalid("positions must lie in (0, 1] and strengths be positive"));
    }
    for i in 0..k {
        for j in 0..k {
            if theta[i] < theta[j] && x[i] >= x[j] {
                return Err(Error::invalid("positions are not consistent with theta"));
            }
        }
    }
    let psi = params.psi();
    let lay = layout(pattern, params.m(), x);
    let (_, children) = pattern.rooted_tree();
    let mut p = (psi + 1.0) * x[0].powf(psi);
    for i in 0..k {
        let Some(np) = lay.n_prime[i] else {
            return Ok(0.0);
        };
        let xp = x[i].powf(psi);
        let h = gamma[i] * (1.0 - xp) / xp;
        let ln_pois = -h + np as f64 * h.ln() - ln_gamma(np as f64 + 1.0);
        p *= if h == 0.0 {
            f64::from(u8::from(np == 0))
        } else {
            ln_pois.exp()
        };
        p *= falling(lay.m_minus[i], lay.left[i]) * x[i].powi(-(lay.left[i] as i32));
        for &c in &children[i] {
            if x[c] > x[i] {
                p *= gamma[i] * psi * x[c].powf(psi - 1.0) / xp;
            }
        }
    }
    Ok(p)
}

/// Density with every strength integrated out:
/// `(psi+1) x_1^psi prod_i G(alpha_i + n'_i + |R_i|) / (G(alpha_i) n'_i!)
///  (1 - x_i^psi)^n'_i x_i^(psi alpha_i) (m_-)_|L_i| x_i^-|L_i| prod_R psi x_j^(psi-1)`.
fn marginal_density(pattern: &SubgraphPattern, params: &ModelParams, children: &[Vec<usize>], x: &[f64]) -> f64 {
    let (a, psi) = (params.a(), params.psi());
    let lay = layout(pattern, params.m(), x);
    let mut p = (psi + 1.0) * x[0].powf(psi);
    for i in 0..x.len() {
        let Some(np) = lay.n_prime[i] else {
            return 0.0;
        };
        let alpha = if lay.is_left[i] { a + 1.0 } else { a };
        let np = np as f64;
        let r = lay.right[i] as f64;
        let xp = x[i].powf(psi);
        let ln = ln_gamma(alpha + np + r) - ln_gamma(alpha) - ln_gamma(np + 1.0)
            + np * (-xp).ln_1p()
            + psi * alpha * x[i].ln()
            - lay.left[i] as f64 * x[i].ln();
        p *= ln.exp() * falling(lay.m_minus[i], lay.left[i]);
        for &c in &children[i] {
            if x[c] > x[i] {
                p *= psi * x[c].powf(psi - 1.0);
            }
        }
    }
    p
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// `t(F, n)` by integrating the density over each order simplex, summed
/// over the `k!` orders. Patterns with more than three vertices are
/// rejected.
pub fn t_hat_quadrature(pattern: &SubgraphPattern, params: &ModelParams) -> Result<f64> {
    if !pattern.is_tree() {
        return Ok(0.0);
    }
    check_tree_pattern(pattern, params)?;
    let k = pattern.vertex_count();
    if k > 3 {
        return Err(Error::invalid("quadrature is limited to patterns with at most 3 vertices"));
    }
    let (_, children) = pattern.rooted_tree();
    let tol = Tolerance {
        abs_tol: 1e-11,
        rel_tol: 1e-9,
        max_pieces: 400,
    };
    let mut total = 0.0;
    for order in permutations(k) {
        // order[r] is the vertex with the r-th smallest position.
        let mut x = vec![0.0; k];
        total += nested(pattern, params, &children, &order, k, 1.0, &mut x, tol)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn nested(
    pattern: &SubgraphPattern,
    params: &ModelParams,
    children: &[Vec<usize>],
    order: &[usize],
    level: usize,
    upper: f64,
    x: &mut Vec<f64>,
    tol: Tolerance,
) -> Result<f64> {
    if level == 0 {
        return Ok(marginal_density(pattern, params, children, x));
    }
    let v = order[level - 1];
    let mut err = None;
    let value = integrate(
        |t| {
            let mut xs = x.clone();
            xs[v] = t;
            match nested(pattern, params, children, order, level - 1, t, &mut xs, tol) {
                Ok(val) => val,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        upper,
        tol,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(value),
    }
}
