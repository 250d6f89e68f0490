//! The limit `F_k = lim_l (l/k)^chi prod_{k<j<=l} (1 - psi_j)` and the map
//! `f_k` with `P(psi_k <= f_k(x)) = P(Gamma(a) <= x)`.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::special::{beta_lower, beta_upper, digamma, gamma_lower, gamma_upper, trigamma};

fn check(k: usize, ell: usize) -> Result<()> {
    if k < 1 || ell <= k {
        return Err(Error::invalid(format!("need ell > k >= 1, got k = {k}, ell = {ell}")));
    }
    Ok(())
}

/// `ln(1 - psi)` for `psi = X / (X + Y)`.
fn ln_one_minus_beta<R: Rng + ?Sized>(ga: &Gamma<f64>, gb: &Gamma<f64>, rng: &mut R) -> f64 {
    let x = ga.sample(rng);
    let y = gb.sample(rng);
    y.ln() - (x + y).ln()
}

/// One draw of the truncated product `(l/k)^chi prod_{k<j<=l} (1 - psi_j)`,
/// with every factor sampled.
pub fn estimate_fk<R: Rng + ?Sized>(params: &ModelParams, k: usize, ell: usize, rng: &mut R) -> Result<f64> {
    check(k, ell)?;
    let ga = Gamma::new(params.a(), 1.0).expect("positive shape");
    let mut log = params.chi() * (ell as f64 / k as f64).ln();
    for j in k + 1..=ell {
        let gb = Gamma::new(params.beta_b(j), 1.0).expect("positive shape");
        log += ln_one_minus_beta(&ga, &gb, rng);
    }
    Ok(log.exp())
}

/// `E[(l/k)^chi prod (1 - psi_j)] = (l/k)^chi prod b_j / (a + b_j)`.
pub fn fk_mean_exact(params: &ModelParams, k: usize, ell: usize) -> Result<f64> {
    check(k, ell)?;
    let a = params.a();
    let mut log = params.chi() * (ell as f64 / k as f64).ln();
    for j in k + 1..=ell {
        let b = params.beta_b(j);
        log += (-a / (a + b)).ln_1p();
    }
    Ok(log.exp())
}

/// Repeated draws of the truncated product for fixed `(k, l)`.
///
/// The first `window` factors are sampled exactly. The log of the remaining
/// factors is a sum of many small independent terms and is drawn from the
/// normal law with its exact mean `sum psi(b_j) - psi(a + b_j)` and variance
/// `sum psi'(b_j) - psi'(a + b_j)`.
#[derive(Debug, Clone)]
pub struct FkSampler {
    shift: f64,
    ga: Gamma<f64>,
    exact: Vec<Gamma<f64>>,
    rest: Option<Normal<f64>>,
}

impl FkSampler {
    pub const DEFAULT_WINDOW: usize = 1000;

    pub fn new(params: &ModelParams, k: usize, ell: usize, window: usize) -> Result<Self> {
        check(k, ell)?;
        let a = params.a();
        let split = ell.min(k + window);
        let exact = (k + 1..=split)
            .map(|j| Gamma::new(params.beta_b(j), 1.0).expect("positive shape"))
            .collect();
        let rest = if split < ell {
            let (mut mean, mut var) = (0.0, 0.0);
            for j in split + 1..=ell {
                let b = params.beta_b(j);
                mean += digamma(b) - digamma(a + b);
                var += trigamma(b) - trigamma(a + b);
            }
            Some(Normal::new(mean, var.max(0.0).sqrt()).map_err(|e| Error::Numeric(e.to_string()))?)
        } else {
            None
        };
        Ok(FkSampler {
            shift: params.chi() * (ell as f64 / k as f64).ln(),
            ga: Gamma::new(a, 1.0).expect("positive shape"),
            exact,
            rest,
        })
    }

    /// One draw of `log F`.
    pub fn sample_log<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut log = self.shift;
        for gb in &self.exact {
            log += ln_one_minus_beta(&self.ga, gb, rng);
        }
        if let Some(rest) = &self.rest {
            log += rest.sample(rng);
        }
        log
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_log(rng).exp()
    }
}

/// `f_k(x)`: the quantile of `psi_k` at the level `P(Gamma(a) <= x)`.
/// Matching is done on whichever tail is smaller, so tiny tail masses keep
/// their relative accuracy. Bisection stops at relative width `1e-12`.
pub fn coupling_map_fk(params: &ModelParams, k: usize, x: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("f_k needs k >= 2"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::invalid(format!("f_k needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let (a, b) = (params.a(), params.beta_b(k));
    let lower = gamma_lower(a, x);
    let use_upper = lower > 0.5;
    let target = if use_upper { gamma_upper(a, x) } else { lower };
    if target == 0.0 {
        return if use_upper { Ok(1.0) } else { Ok(0.0) };
    }
    // g(f) increasing in f; g(f) - target changes sign on (lo, hi).
    let g = |f: f64| {
        if use_upper {
            -beta_upper(a, b, f)
        } else {
            beta_lower(a, b, f)
        }
    };
    let goal = if use_upper { -target } else { target };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..2000 {
        let mid = if lo > 0.0 && hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let mid = if mid == 0.0 { hi * 1e-3 } else { mid };
        if g(mid) < goal {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Numeric(format!("f_k bisection did not converge at k = {k}, x = {x}")))
}
