//! Joint law of `(D', D)`:
//!
//! ```text
//! P(D' = m+1+k, D = m+j) = (psi+1)/psi^2 * G(k+a+1)/(k! G(a+1)) * G(j+a)/(j! G(a))
//!                          * int_0^1 dv (1-v)^k v^(a+1/psi) int_v^1 du (1-u)^j u^a
//! ```
//!
//! The inner integral is an incomplete beta function; the outer one is done
//! by adaptive quadrature around the peak of `(1-v)^k v^(a+1/psi)`.

use super::degree_prob;
use crate::error::Result;
use crate::params::ModelParams;
use crate::quadrature::{integrate_with_breaks, Tolerance};
use crate::special::{beta_lower, beta_upper, ln_beta, ln_gamma};

const TOL: Tolerance = Tolerance {
    abs_tol: 1e-15,
    rel_tol: 1e-10,
    max_pieces: 4000,
};

/// `{0, 1}` plus a geometric ladder around each scale.
fn breaks(scales: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0, 1.0];
    for &s in scales {
        for i in -8..=8 {
            let x = s * 2f64.powi(i);
            if x > 0.0 && x < 1.0 {
                b.push(x);
            }
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn ln_nb_coef(r: f64, k: f64) -> f64 {
    ln_gamma(k + r) - ln_gamma(k + 1.0) - ln_gamma(r)
}

fn ln_front(params: &ModelParams) -> f64 {
    let psi = params.psi();
    ((psi + 1.0) / (psi * psi)).ln()
}

/// `P(D' = m + 1 + k, D = m + j)`.
pub fn joint_degree_pmf(params: &ModelParams, j: usize, k: usize) -> Result<f64> {
    let (a, psi) = (params.a(), params.psi());
    let c = a + 1.0 / psi;
    let (jf, kf) = (j as f64, k as f64);
    let ln_pref = ln_front(params) + ln_nb_coef(a + 1.0, kf) + ln_nb_coef(a, jf) + ln_beta(a + 1.0, jf + 1.0);
    let f = |v: f64| {
        if v <= 0.0 || v >= 1.0 {
            return 0.0;
        }
        (ln_pref + kf * (-v).ln_1p() + c * v.ln()).exp() * beta_upper(a + 1.0, jf + 1.0, v)
    };
    let scales = [c / (c + kf), (a + 1.0) / (a + jf + 2.0)];
    integrate_with_breaks(f, &breaks(&scales), TOL)
}

/// `P(D' = m + 1 + k | D = m + j)`.
pub fn conditional_neighbor_degree(params: &ModelParams, j: usize, k: usize) -> Result<f64> {
    Ok(joint_degree_pmf(params, j, k)? / degree_prob(params, j))
}

/// `sum_k P(D' = m+1+k, D = m+j)`: terms `k <= k_cut` one by one, the rest
/// through the negative binomial tail
/// `sum_{k > K} G(k+a+1)/(k! G(a+1)) (1-v)^k = v^-(a+1) (1 - I_v(a+1, K+1))`.
pub fn joint_sum_over_k(params: &ModelParams, j: usize, k_cut: usize) -> Result<f64> {
    let (a, psi) = (params.a(), params.psi());
    let jf = j as f64;
    let mut sum = 0.0;
    for k in 0..=k_cut {
        sum += joint_degree_pmf(params, j, k)?;
    }
    let ln_pref = ln_front(params) + ln_nb_coef(a, jf) + ln_beta(a + 1.0, jf + 1.0);
    let kk = (k_cut + 1) as f64;
    let f = |v: f64| {
        if v <= 0.0 || v >= 1.0 {
            return 0.0;
        }
        (ln_pref + (1.0 / psi - 1.0) * v.ln()).exp()
            * beta_upper(a + 1.0, jf + 1.0, v)
            * beta_upper(a + 1.0, kk, v)
    };
    let scales = [(a + 1.0) / (a + kk + 1.0), (a + 1.0) / (a + jf + 2.0)];
    Ok(sum + integrate_with_breaks(f, &breaks(&scales), TOL)?)
}

/// `sum_j P(D' = m+1+k, D = m+j)`, split the same way with the tail
/// `sum_{j > J} G(j+a)/(j! G(a)) (1-u)^j = u^-a (1 - I_u(a, J+1))`.
pub fn joint_sum_over_j(params: &ModelParams, k: usize, j_cut: usize) -> Result<f64> {
    let (a, psi) = (params.a(), params.psi());
    let c = a + 1.0 / psi;
    let kf = k as f64;
    let mut sum = 0.0;
    for j in 0..=j_cut {
        sum += joint_degree_pmf(params, j, k)?;
    }
    let ln_pref = ln_front(params) + ln_nb_coef(a + 1.0, kf) + ln_beta(c + 1.0, kf + 1.0);
    let jj = (j_cut + 1) as f64;
    let f = |u: f64| {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        ln_pref.exp() * beta_upper(a, jj, u) * beta_lower(c + 1.0, kf + 1.0, u)
    };
    let scales = [a / (a + jj), (c + 1.0) / (c + kf + 2.0)];
    Ok(sum + integrate_with_breaks(f, &breaks(&scales), TOL)?)
}

#[cfg(test)]
mod tests {
    use super::super::neighbor_degree_prob;
    use super::*;

    #[test]
    fn marginals_match() {
        for alpha in [0.0, 0.5] {
            let params = ModelParams::new(2, alpha).unwrap();
            for j in [0, 3, 10] {
                let s = joint_sum_over_k(&params, j, 200).unwrap();
                assert!((s - degree_prob(&params, j)).abs() < 1e-9, "alpha={alpha} j={j}");
            }
            for k in [0, 4, 10] {
                let s = joint_sum_over_j(&params, k, 60).unwrap();
                assert!((s - neighbor_degree_prob(&params, k)).abs() < 1e-9, "alpha={alpha} k={k}");
            }
        }
    }

    #[test]
    fn tails_do_not_depend_on_cut() {
        let params = ModelParams::new(3, 0.2).unwrap();
        let a = joint_sum_over_k(&params, 2, 5).unwrap();
        let b = joint_sum_over_k(&params, 2, 50).unwrap();
        assert!((a - b).abs() < 1e-11);
    }

    #[test]
    fn alpha_zero_single_point() {
        // m = 1, alpha = 0, j = k = 0: 2 * 1 * 1 * int_0^1 v^2 (1 - v^2)/2 dv = 2/15.
        let params = ModelParams::new(1, 0.0).unwrap();
        let v = joint_degree_pmf(&params, 0, 0).unwrap();
        assert!((v - 2.0 / 15.0).abs() < 1e-13, "{v}");
    }
}
