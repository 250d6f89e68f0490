//! Maximal coupling of the sequential and the independent rule.
//!
//! Both graphs are grown side by side. At every vertex the two target
//! vectors are drawn from a coupling that minimizes the probability of
//! disagreement given the respective histories. While the vector support
//! `(t - 1)^m` is small the coupling is exact on whole vectors; beyond
//! [`EXACT_SUPPORT_LIMIT`] each slot is coupled maximally given the earlier
//! slots, which keeps both marginals exact but is only slot-wise optimal.

use rand::Rng;
use serde::Serialize;

use super::{
    draw_independent, draw_sequential, independent_slot_prob, sequential_slot_prob, start, DegreeState,
};
use crate::error::Result;
use crate::graph::{ModelTag, PaGraph};
use crate::params::ModelParams;

/// Largest vector support coupled exactly.
pub const EXACT_SUPPORT_LIMIT: usize = 4096;

/// Vertex whose coupled target vectors disagree, with the 1-based slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub vertex: usize,
    pub slots: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CoupledPair {
    pub g_seq: PaGraph,
    pub g_ind: PaGraph,
    pub discrepancies: Vec<Discrepancy>,
    /// Set when any vertex used the slot-wise coupling.
    pub approximate: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    n: usize,
    m: usize,
    alpha: f64,
    seed: Option<String>,
    approximate: bool,
    diffs: &'a [Discrepancy],
}

impl CoupledPair {
    /// JSON discrepancy report `{n, m, alpha, seed, approximate, diffs}`.
    pub fn report_json(&self) -> serde_json::Value {
        serde_json::to_value(Report {
            n: self.g_seq.n(),
            m: self.g_seq.m(),
            alpha: self.g_seq.params().alpha(),
            seed: self.g_seq.seed().map(|s| s.to_string()),
            approximate: self.approximate,
            diffs: &self.discrepancies,
        })
        .expect("serializable report")
    }

    /// Fraction of vertices `k >= from` whose received edges `(sender, slot)`
    /// differ between the two graphs.
    pub fn received_mismatch_fraction(&self, from: usize) -> f64 {
        let n = self.g_seq.n();
        let mut differs = vec![false; n + 1];
        for (a, b) in self.g_seq.targets().iter().zip(self.g_ind.targets()) {
            if a != b {
                differs[*a as usize] = true;
                differs[*b as usize] = true;
            }
        }
        let from = from.max(1);
        let count = (from..=n).filter(|&k| differs[k]).count();
        count as f64 / (n + 1 - from) as f64
    }
}

/// Joint law of a maximal coupling of two distributions on the same finite
/// support: the common part `min(p, q)` sits on the diagonal and the
/// residuals `(p - q)+` and `(q - p)+` are paired by quantiles in index
/// order, so residual mass is moved between lexicographic neighbors.
#[derive(Debug, Clone)]
pub struct CouplingLaw {
    pub overlap: Vec<f64>,
    pub residual_p: Vec<f64>,
    pub residual_q: Vec<f64>,
    /// `1 - sum(overlap)`, the total variation distance.
    pub tv: f64,
}

pub fn maximal_coupling(p: &[f64], q: &[f64]) -> CouplingLaw {
    assert_eq!(p.len(), q.len());
    let overlap: Vec<f64> = p.iter().zip(q).map(|(a, b)| a.min(*b)).collect();
    let residual_p: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a - b).max(0.0)).collect();
    let residual_q: Vec<f64> = p.iter().zip(q).map(|(a, b)| (b - a).max(0.0)).collect();
    let tv = (1.0 - overlap.iter().sum::<f64>()).max(0.0);
    CouplingLaw {
        overlap,
        residual_p,
        residual_q,
        tv,
    }
}

fn cumulative(w: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    w.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

impl CouplingLaw {
    /// Probability of the pair `(x, y)`.
    pub fn joint(&self, x: usize, y: usize) -> f64 {
        let diag = if x == y { self.overlap[x] } else { 0.0 };
        let (cp, cq) = (cumulative(&self.residual_p), cumulative(&self.residual_q));
        let (sp, sq) = (self.total(&self.residual_p), self.total(&self.residual_q));
        if sp <= 0.0 || sq <= 0.0 {
            return diag;
        }
        // Residual quantile intervals, both rescaled to [0, tv).
        let (p0, p1) = ((cp[x] - self.residual_p[x]) / sp, cp[x] / sp);
        let (q0, q1) = ((cq[y] - self.residual_q[y]) / sq, cq[y] / sq);
        diag + (p1.min(q1) - p0.max(q0)).max(0.0) * self.tv
    }

    fn total(&self, w: &[f64]) -> f64 {
        w.iter().sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let u = rng.random::<f64>();
        if u >= self.tv {
            let x = pick(&self.overlap, (u - self.tv) / (1.0 - self.tv));
            (x, x)
        } else {
            let v = u / self.tv;
            (pick(&self.residual_p, v), pick(&self.residual_q, v))
        }
    }
}

/// Index whose cumulative share of `w` covers `v` in `[0, 1)`.
fn pick(w: &[f64], v: f64) -> usize {
    let total: f64 = w.iter().sum();
    let mut u = v * total;
    let mut last = 0;
    for (i, &x) in w.iter().enumerate() {
        if x > 0.0 {
            last = i;
            if u < x {
                return i;
            }
            u -= x;
        }
    }
    last
}

/// Enumerates the target-vector laws of vertex `t` in lexicographic order.
pub(crate) fn vector_laws(
    params: &ModelParams,
    t: usize,
    seq: &DegreeState,
    ind: &DegreeState,
) -> (Vec<f64>, Vec<f64>) {
    let m = params.m();
    let base = t - 1;
    let size = base.pow(m as u32);
    let mut p = Vec::with_capacity(size);
    let mut q = Vec::with_capacity(size);
    let mut digits = vec![0usize; m];
    let mut extra = vec![0u64; base];
    for code in 0..size {
        let mut c = code;
        for d in digits.iter_mut().rev() {
            *d = c % base;
            c /= base;
        }
        let mut ps = 1.0;
        let mut qs = 1.0;
        for (i, &w) in digits.iter().enumerate() {
            let v = w + 1;
            ps *= sequential_slot_prob(params, t, i + 1, seq.degree(v) + extra[w]);
            qs *= independent_slot_prob(params, t, ind.degree(v));
            extra[w] += 1;
        }
        for &w in &digits {
            extra[w] = 0;
        }
        p.push(ps);
        q.push(qs);
    }
    (p, q)
}

fn decode(code: usize, base: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    let mut c = code;
    for d in out.iter_mut().rev() {
        *d = c % base + 1;
        c /= base;
    }
    out
}

pub fn generate_coupled<R: Rng + ?Sized>(params: &ModelParams, n: usize, rng: &mut R) -> Result<CoupledPair> {
    super::check_size(params, n)?;
    let m = params.m();
    let (mut t_seq, mut seq) = start(params, n);
    let (mut t_ind, mut ind) = (t_seq.clone(), seq.clone());
    let mut discrepancies = Vec::new();
    let mut approximate = false;
    let mut e = vec![0usize; m];
    let mut f = vec![0usize; m];

    for t in 3..=n {
        let exact = (t - 1)
            .checked_pow(m as u32)
            .is_some_and(|s| s <= EXACT_SUPPORT_LIMIT);
        if exact {
            let (p, q) = vector_laws(params, t, &seq, &ind);
            let (x, y) = maximal_coupling(&p, &q).sample(rng);
            e.copy_from_slice(&decode(x, t - 1, m));
            f.copy_from_slice(&decode(y, t - 1, m));
            for i in 0..m {
                seq.bump(e[i], 1);
                ind.bump(f[i], 1);
            }
        } else {
            approximate = true;
            for i in 1..=m {
                let (x, y) = couple_slot(params, t, i, &seq, &ind, rng);
                e[i - 1] = x;
                f[i - 1] = y;
                seq.bump(x, 1);
            }
            for &y in &f {
                ind.bump(y, 1);
            }
        }
        let slots: Vec<usize> = (0..m).filter(|&i| e[i] != f[i]).map(|i| i + 1).collect();
        if !slots.is_empty() {
            discrepancies.push(Discrepancy { vertex: t, slots });
        }
        t_seq.extend(e.iter().map(|&w| w as u32));
        t_ind.extend(f.iter().map(|&w| w as u32));
        seq.bump(t, m as u64);
        ind.bump(t, m as u64);
    }

    Ok(CoupledPair {
        g_seq: PaGraph::from_raw(*params, n, ModelTag::Sequential, t_seq),
        g_ind: PaGraph::from_raw(*params, n, ModelTag::Independent, t_ind),
        discrepancies,
        approximate,
    })
}

/// Maximal coupling of one slot by rejection: draw `x ~ p`, keep it for `q`
/// with probability `min(1, q(x)/p(x))`, otherwise draw `y` from the
/// normalized residual `(q - p)+`.
fn couple_slot<R: Rng + ?Sized>(
    params: &ModelParams,
    t: usize,
    i: usize,
    seq: &DegreeState,
    ind: &DegreeState,
    rng: &mut R,
) -> (usize, usize) {
    let p = |v: usize| sequential_slot_prob(params, t, i, seq.degree(v));
    let q = |v: usize| independent_slot_prob(params, t, ind.degree(v));
    let x = draw_sequential(params, t, i, seq, rng);
    if rng.random::<f64>() * p(x) <= q(x) {
        return (x, x);
    }
    loop {
        let y = draw_independent(params, t, ind, rng);
        if rng.random::<f64>() * q(y) > p(y) {
            return (x, y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSpec;

    #[test]
    fn coupling_law_marginals_and_tv() {
        let p = [0.5, 0.3, 0.2, 0.0];
        let q = [0.25, 0.25, 0.25, 0.25];
        let law = maximal_coupling(&p, &q);
        let tv_direct: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
        assert!((law.tv - tv_direct).abs() < 1e-15);
        for x in 0..4 {
            let row: f64 = (0..4).map(|y| law.joint(x, y)).sum();
            let col: f64 = (0..4).map(|y| law.joint(y, x)).sum();
            assert!((row - p[x]).abs() < 1e-15);
            assert!((col - q[x]).abs() < 1e-15);
        }
        let off: f64 = (0..4)
            .flat_map(|x| (0..4).map(move |y| (x, y)))
            .filter(|(x, y)| x != y)
            .map(|(x, y)| law.joint(x, y))
            .sum();
        assert!((off - tv_direct).abs() < 1e-15);
    }

    #[test]
    fn third_vertex_disagrees_with_tv_probability() {
        // alpha = 0, t = 3: the sequential vector law is (0.3, 0.2, 0.2, 0.3)
        // against the uniform independent law, so the optimal mismatch is 0.1.
        let params = ModelParams::new(2, 0.0).unwrap();
        let seq = DegreeState { deg: vec![2, 2, 0], tree: {
            let mut f = crate::fenwick::Fenwick::new(3);
            f.add(0, 2);
            f.add(1, 2);
            f
        } };
        let (p, q) = vector_laws(&params, 3, &seq, &seq);
        let expect_p = [0.3, 0.2, 0.2, 0.3];
        for (a, b) in p.iter().zip(expect_p) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(q.iter().all(|x| (x - 0.25).abs() < 1e-15));
        assert!((maximal_coupling(&p, &q).tv - 0.1).abs() < 1e-15);

        let runs = 40_000;
        let mut rng = SeedSpec::new(3).rng();
        let mut hits = 0;
        for _ in 0..runs {
            let pair = generate_coupled(&params, 3, &mut rng).unwrap();
            hits += pair.discrepancies.len();
        }
        let freq = hits as f64 / runs as f64;
        assert!((freq - 0.1).abs() < 4.0 * (0.09f64 / runs as f64).sqrt(), "{freq}");
    }

    #[test]
    fn first_slot_agrees_at_third_vertex() {
        // alpha = 0, t = 3: slot 1 is uniform on {1, 2} under both rules and
        // the residual mass only moves between (1,1)/(1,2) and (2,2)/(2,1).
        let params = ModelParams::new(2, 0.0).unwrap();
        let mut rng = SeedSpec::new(13).rng();
        for _ in 0..2000 {
            let pair = generate_coupled(&params, 3, &mut rng).unwrap();
            assert_eq!(pair.g_seq.sends(3)[0], pair.g_ind.sends(3)[0]);
        }
    }

    #[test]
    fn exact_steps_minimize_mismatch() {
        // Brute force over every history of n = 5, m = 2: the per-vertex
        // mismatch probability of the coupling equals the total variation
        // between the two conditional laws, which no coupling can beat.
        let params = ModelParams::new(2, 0.4).unwrap();
        let mut hist = vec![(start(&params, 5).1, start(&params, 5).1)];
        for t in 3..=5 {
            let mut next = Vec::new();
            for (s, i) in &hist {
                let (p, q) = vector_laws(&params, t, s, i);
                let law = maximal_coupling(&p, &q);
                let tv_direct: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
                let mismatch: f64 = (0..p.len())
                    .flat_map(|x| (0..p.len()).map(move |y| (x, y)))
                    .filter(|(x, y)| x != y)
                    .map(|(x, y)| law.joint(x, y))
                    .sum();
                assert!((mismatch - tv_direct).abs() < 1e-14);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                for code in 0..p.len() {
                    let mut s2 = s.clone();
                    let mut i2 = i.clone();
                    for w in decode(code, t - 1, 2) {
                        s2.bump(w, 1);
                        i2.bump(w, 1);
                    }
                    s2.bump(t, 2);
                    i2.bump(t, 2);
                    next.push((s2, i2));
                }
            }
            hist = next;
        }
    }

    #[test]
    fn both_graphs_valid_and_log_consistent() {
        let params = ModelParams::new(2, 0.3).unwrap();
        let pair = generate_coupled(&params, 3000, &mut SeedSpec::new(12).rng()).unwrap();
        assert!(pair.approximate);
        let mut logged = std::collections::BTreeMap::new();
        for d in &pair.discrepancies {
            logged.insert(d.vertex, d.slots.clone());
        }
        for v in 2..=3000 {
            let a = pair.g_seq.sends(v);
            let b = pair.g_ind.sends(v);
            let slots: Vec<usize> = (0..2).filter(|&i| a[i] != b[i]).map(|i| i + 1).collect();
            assert_eq!(logged.get(&v).cloned().unwrap_or_default(), slots);
        }
        let json = pair.report_json();
        assert_eq!(json["n"], 3000);
        assert!(json["diffs"].is_array());
    }
}
