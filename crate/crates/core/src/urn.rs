//! Pólya-urn representation of the sequential model.
//!
//! Vertex `j >= 2` gets an independent strength `psi_j ~ Beta(a, b_j)` with
//! `a = m + 2mu` and `b_j = (2j - 3)m + 2mu(j - 1)`; `psi_1 = 1`. The vertex
//! occupies the interval `[S_{j-1}, S_j)` of `[0, 1]` where
//! `S_k = prod_{j > k} (1 - psi_j)`. Each slot of vertex `k` then lands
//! uniformly in `[0, S_{k-1})`, independently given the strengths.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::graph::{ModelTag, PaGraph};
use crate::params::ModelParams;

/// Draws `Beta(a, b)` as `X / (X + Y)` with `X ~ Gamma(a)`, `Y ~ Gamma(b)`.
pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let x = Gamma::new(a, 1.0).expect("positive shape").sample(rng);
    let y = Gamma::new(b, 1.0).expect("positive shape").sample(rng);
    x / (x + y)
}

/// One draw of `psi_j`, `j >= 2`.
pub fn sample_psi<R: Rng + ?Sized>(params: &ModelParams, j: usize, rng: &mut R) -> Result<f64> {
    if j < 2 {
        return Err(Error::invalid("psi_1 is the constant 1; j must be >= 2"));
    }
    Ok(sample_beta(params.a(), params.beta_b(j), rng))
}

/// Frozen strengths and interval endpoints for an `n`-vertex urn.
#[derive(Debug, Clone, PartialEq)]
pub struct UrnState {
    /// `psis[j - 1] = psi_j`.
    psis: Vec<f64>,
    /// `s[k - 1] = S_k`.
    s: Vec<f64>,
}

impl UrnState {
    /// Builds a state from given strengths (`psis[0]` must be 1).
    pub fn from_psis(psis: Vec<f64>) -> Result<Self> {
        if psis.len() < 2 {
            return Err(Error::invalid("urn needs n >= 2"));
        }
        if psis[0] != 1.0 {
            return Err(Error::invalid("psi_1 must equal 1"));
        }
        if psis[1..].iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::invalid("psi_j must lie in (0, 1) for j >= 2"));
        }
        let n = psis.len();
        let mut s = vec![0.0; n];
        s[n - 1] = 1.0;
        for k in (1..n).rev() {
            s[k - 1] = s[k] * (1.0 - psis[k]);
        }
        Ok(UrnState { psis, s })
    }

    pub fn n(&self) -> usize {
        self.psis.len()
    }

    /// `psi_j`, 1-based.
    pub fn psi(&self, j: usize) -> f64 {
        self.psis[j - 1]
    }

    /// `S_k`, 1-based, with `S_0 = 0`.
    pub fn s(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.s[k - 1]
        }
    }

    /// Interval length `phi_j = psi_j S_j`.
    pub fn phi(&self, j: usize) -> f64 {
        self.psis[j - 1] * self.s[j - 1]
    }

    pub fn positions(&self) -> &[f64] {
        &self.s
    }

    pub fn psis(&self) -> &[f64] {
        &self.psis
    }

    /// Writes `k psi phi S` rows.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k\tpsi\tphi\tS")?;
        for k in 1..=self.n() {
            writeln!(out, "{k}\t{}\t{}\t{}", self.psi(k), self.phi(k), self.s(k))?;
        }
        Ok(())
    }
}

pub fn build_urn_state<R: Rng + ?Sized>(
    params: &ModelParams,
    n: usize,
    rng: &mut R,
) -> Result<UrnState> {
    if n < 2 {
        return Err(Error::invalid("urn needs n >= 2"));
    }
    let a = params.a();
    let shape_a = Gamma::new(a, 1.0).map_err(|e| Error::Numeric(e.to_string()))?;
    let mut psis = Vec::with_capacity(n);
    psis.push(1.0);
    for j in 2..=n {
        let x = shape_a.sample(rng);
        let y = Gamma::new(params.beta_b(j), 1.0)
            .map_err(|e| Error::Numeric(e.to_string()))?
            .sample(rng);
        let mut p = x / (x + y);
        // Clamp the measure-zero endpoints produced by underflow.
        if p <= 0.0 {
            p = f64::MIN_POSITIVE;
        } else if p >= 1.0 {
            p = 1.0 - f64::EPSILON;
        }
        psis.push(p);
    }
    UrnState::from_psis(psis)
}

/// Index `j` (1-based) with `S_{j-1} <= point < S_j`, `S_0 = 0`.
pub fn locate_interval(s: &[f64], point: f64) -> Result<usize> {
    let last = s.last().copied().unwrap_or(0.0);
    if !(point >= 0.0 && point < last) {
        return Err(Error::PointOutOfRange { point, upper: last });
    }
    Ok(s.partition_point(|&x| x <= point) + 1)
}

/// Generates the sequential model through its urn representation, keeping
/// the strengths.
pub fn generate_polya_with_state<R: Rng + ?Sized>(
    params: &ModelParams,
    n: usize,
    rng: &mut R,
) -> Result<(PaGraph, UrnState)> {
    params.check_graph_model()?;
    let state = build_urn_state(params, n, rng)?;
    let m = params.m();
    let mut targets = Vec::with_capacity(m * (n - 1));
    targets.extend(std::iter::repeat_n(1u32, m));
    for k in 3..=n {
        let prefix = &state.s[..k - 1];
        let upper = prefix[k - 2];
        for _ in 0..m {
            let point = rng.random::<f64>() * upper;
            let j = locate_interval(prefix, point).unwrap_or(k - 1);
            targets.push(j as u32);
        }
    }
    Ok((PaGraph::from_raw(*params, n, ModelTag::Polya, targets), state))
}

pub fn generate_polya<R: Rng + ?Sized>(params: &ModelParams, n: usize, rng: &mut R) -> Result<PaGraph> {
    generate_polya_with_state(params, n, rng).map(|(g, _)| g)
}
