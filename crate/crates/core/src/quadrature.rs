//! Globally adaptive 31-point Gauss–Legendre quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 31;

fn nodes() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(ORDER))
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn rule<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Tolerances for [`integrate`]. Converged when the summed error estimate is
/// below `max(abs_tol, rel_tol * |I|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_pieces: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_pieces: 2000,
        }
    }
}

fn piece<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64) -> Piece {
    let mid = 0.5 * (a + b);
    let value = rule(f, a, mid) + rule(f, mid, b);
    Piece {
        a,
        b,
        value,
        err: (value - whole).abs(),
    }
}

/// Integrates `f` over the partition given by `breaks` (sorted, at least two
/// points). Returns the value; fails if the tolerance is not reached.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let whole = rule(&mut f, w[0], w[1]);
            heap.push(piece(&mut f, w[0], w[1], whole));
        }
    }
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let target = tol.abs_tol.max(tol.rel_tol * total.abs());
        if err <= target {
            return Ok(total);
        }
        if heap.len() >= tol.max_pieces {
            return Err(Error::Quadrature {
                achieved: err,
                requested: target,
            });
        }
        let worst = heap.pop().expect("non-empty partition");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at machine resolution; accept its estimate.
            heap.push(Piece { err: 0.0, ..worst });
            continue;
        }
        let left_whole = rule(&mut f, worst.a, mid);
        let right_whole = rule(&mut f, mid, worst.b);
        heap.push(piece(&mut f, worst.a, mid, left_whole));
        heap.push(piece(&mut f, mid, worst.b, right_whole));
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    integrate_with_breaks(f, &[a, b], tol)
}
