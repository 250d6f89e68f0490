//! Closed-form degree laws of the limit, the expected degree of early
//! vertices, and the limit statistics `F_k` and `f_k` of the urn strengths.
//!
//! With `a = m + 2mu` and `psi = 1 / (1 + 2u)`, the degree `D` of a uniform
//! vertex and the degree `D'` of one of its older neighbors satisfy
//!
//! ```text
//! P(D  = m + k)     = (psi+1)/psi   * G(a+1/psi+1)/G(a)   * G(k+a)/G(a+1/psi+k+2)
//! P(D' = m + 1 + k) = (psi+1)/psi^2 * G(a+1/psi+1)/G(a+1) * (k+1) G(k+a+1)/G(a+1/psi+k+3)
//! ```

mod fk;
mod joint;

pub use fk::{coupling_map_fk, estimate_fk, fk_mean_exact, FkSampler};
pub use joint::{conditional_neighbor_degree, joint_degree_pmf, joint_sum_over_j, joint_sum_over_k};

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::special::ln_gamma;

/// Probabilities of `offset, offset + 1, ...` and the mass beyond them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    pub offset: usize,
    pub probs: Vec<f64>,
    pub tail_bound: f64,
}

impl Pmf {
    /// `P(X = value)`, zero outside the tabulated range.
    pub fn prob(&self, value: usize) -> f64 {
        value
            .checked_sub(self.offset)
            .and_then(|i| self.probs.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// Tabulated mass plus tail.
    pub fn total(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.tail_bound
    }

    /// Writes `k prob` rows, `k` being the value itself.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k\tprob")?;
        for (i, p) in self.probs.iter().enumerate() {
            writeln!(out, "{}\t{:.17e}", self.offset + i, p)?;
        }
        Ok(())
    }
}

/// `sum_{k >= K} G(k+p) / G(k+q)` for `q - p > 1`, in log form.
fn ln_gamma_ratio_tail(p: f64, q: f64, big_k: f64) -> f64 {
    ln_gamma(big_k + p) - ln_gamma(big_k + q - 1.0) - (q - p - 1.0).ln()
}

fn ln_degree_const(params: &ModelParams) -> f64 {
    let (a, psi) = (params.a(), params.psi());
    ((psi + 1.0) / psi).ln() + ln_gamma(a + 1.0 / psi + 1.0) - ln_gamma(a)
}

fn ln_neighbor_const(params: &ModelParams) -> f64 {
    let (a, psi) = (params.a(), params.psi());
    ((psi + 1.0) / (psi * psi)).ln() + ln_gamma(a + 1.0 / psi + 1.0) - ln_gamma(a + 1.0)
}

/// `P(D = m + k)`.
pub fn degree_prob(params: &ModelParams, k: usize) -> f64 {
    let (a, psi) = (params.a(), params.psi());
    let k = k as f64;
    (ln_degree_const(params) + ln_gamma(k + a) - ln_gamma(a + 1.0 / psi + k + 2.0)).exp()
}

/// `P(D' = m + 1 + k)`.
pub fn neighbor_degree_prob(params: &ModelParams, k: usize) -> f64 {
    let (a, psi) = (params.a(), params.psi());
    let k = k as f64;
    (ln_neighbor_const(params) + (k + 1.0).ln() + ln_gamma(k + a + 1.0) - ln_gamma(a + 1.0 / psi + k + 3.0)).exp()
}

/// Law of the degree of a uniform vertex, `k = 0..=k_max`. The tail is
/// summed in closed form through `sum_{k>=K} G(k+p)/G(k+q) = G(K+p) / ((q-p-1) G(K+q-1))`.
pub fn degree_dist_pmf(params: &ModelParams, k_max: usize) -> Pmf {
    let (a, psi) = (params.a(), params.psi());
    let probs = (0..=k_max).map(|k| degree_prob(params, k)).collect();
    let tail = ln_degree_const(params) + ln_gamma_ratio_tail(a, a + 1.0 / psi + 2.0, (k_max + 1) as f64);
    Pmf {
        offset: params.m(),
        probs,
        tail_bound: tail.exp(),
    }
}

/// Law of the degree of an older neighbor of a uniform vertex.
pub fn neighbor_degree_dist_pmf(params: &ModelParams, k_max: usize) -> Pmf {
    let (a, psi) = (params.a(), params.psi());
    let probs = (0..=k_max).map(|k| neighbor_degree_prob(params, k)).collect();
    // (k+1) G(k+a+1) = G(k+a+2) - a G(k+a+1).
    let big_k = (k_max + 1) as f64;
    let q = a + 1.0 / psi + 3.0;
    let base = ln_gamma(big_k + a + 1.0) - ln_gamma(big_k + q - 1.0);
    let bracket = (big_k + a + 1.0) * psi - a / (1.0 / psi + 1.0);
    Pmf {
        offset: params.m() + 1,
        probs,
        tail_bound: (ln_neighbor_const(params) + base).exp() * bracket,
    }
}

fn check_k_n(n: usize, k: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(())
}

/// Leading-order expected degree of vertex `k` in a graph on `n` vertices:
/// `m [1 + chi/(1-chi) ((n/k)^(1-chi) - 1)]`.
pub fn expected_degree(params: &ModelParams, n: usize, k: usize) -> Result<f64> {
    check_k_n(n, k)?;
    let (m, chi) = (params.m() as f64, params.chi());
    Ok(m * (1.0 + chi / (1.0 - chi) * ((n as f64 / k as f64).powf(1.0 - chi) - 1.0)))
}

/// Size of the correction to [`expected_degree`], taken as
/// `4 m chi/(1-chi) n^(1-chi) / k^(2-chi)`.
pub fn expected_degree_error_bound(params: &ModelParams, n: usize, k: usize) -> Result<f64> {
    check_k_n(n, k)?;
    let (m, chi) = (params.m() as f64, params.chi());
    Ok(4.0 * m * chi / (1.0 - chi) * (n as f64).powf(1.0 - chi) / (k as f64).powf(2.0 - chi))
}

/// Exact `E[d_n(k)]` from the urn: each slot of vertex `l + 1 > k` lands on
/// `k` with mean probability `E[psi_k] prod_{k<i<=l} (1 - E[psi_i])`.
pub fn expected_degree_exact(params: &ModelParams, n: usize, k: usize) -> Result<f64> {
    check_k_n(n, k)?;
    let m = params.m() as f64;
    let mean_psi = |j: usize| {
        if j == 1 {
            1.0
        } else {
            params.a() / (params.a() + params.beta_b(j))
        }
    };
    let mut hit = mean_psi(k);
    let mut sum = 0.0;
    for l in k..n {
        if l > k {
            hit *= 1.0 - mean_psi(l);
        }
        sum += hit;
    }
    let own = if k >= 2 { m } else { 0.0 };
    Ok(own + m * sum)
}
