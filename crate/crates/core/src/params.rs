use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model parameters `m`, `alpha` and the constants derived from them.
///
/// `u = alpha / (1 - alpha)`, `chi = (1 + 2u) / (2 + 2u)`, `psi = 1 / (1 + 2u)`
/// and `a = m + 2mu`. Every distribution in the crate is expressed through
/// these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    m: usize,
    alpha: f64,
    u: f64,
    chi: f64,
    psi: f64,
    a: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    m: usize,
    alpha: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.m, raw.alpha)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            m: p.m,
            alpha: p.alpha,
        }
    }
}

impl ModelParams {
    /// Validates `m >= 1` and `0 <= alpha < 1` and derives the constants.
    pub fn new(m: usize, alpha: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m must be at least 1"));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 1), got {alpha}")));
        }
        let u = alpha / (1.0 - alpha);
        let chi = (1.0 + 2.0 * u) / (2.0 + 2.0 * u);
        let psi = 1.0 / (1.0 + 2.0 * u);
        let a = m as f64 + 2.0 * m as f64 * u;
        Ok(ModelParams {
            m,
            alpha,
            u,
            chi,
            psi,
            a,
        })
    }

    /// Graph generators need at least two edges per vertex.
    pub fn check_graph_model(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::invalid("graph models require m >= 2"));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// The exponent `psi = (1 - chi) / chi`.
    pub fn psi(&self) -> f64 {
        self.psi
    }

    /// Gamma shape `a = m + 2mu` of root and right-type strengths.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Second shape of the beta law of `psi_j`: `(2j - 3)m + 2mu(j - 1)`.
    pub fn beta_b(&self, j: usize) -> f64 {
        let m = self.m as f64;
        let j = j as f64;
        (2.0 * j - 3.0) * m + 2.0 * m * self.u * (j - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_zero_collapses_u() {
        let p = ModelParams::new(2, 0.0).unwrap();
        assert_eq!(p.u(), 0.0);
        assert_eq!(p.chi(), 0.5);
        assert_eq!(p.psi(), 1.0);
        assert_eq!(p.a(), 2.0);
    }

    #[test]
    fn alpha_half() {
        let p = ModelParams::new(2, 0.5).unwrap();
        assert!((p.u() - 1.0).abs() < 1e-15);
        assert!((p.chi() - 0.75).abs() < 1e-15);
        assert!((p.psi() - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.a() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_domain_boundaries() {
        assert!(ModelParams::new(3, 1.0).is_err());
        assert!(ModelParams::new(3, -0.1).is_err());
        assert!(ModelParams::new(0, 0.3).is_err());
        assert!(ModelParams::new(1, 0.3).unwrap().check_graph_model().is_err());
    }

    #[test]
    fn beta_shapes_positive() {
        let p = ModelParams::new(2, 0.0).unwrap();
        assert_eq!(p.beta_b(2), p.a());
        assert_eq!(p.beta_b(10), 34.0);
    }

    proptest::proptest! {
        #[test]
        fn derived_constants_consistent(m in 1usize..50, alpha in 0.0f64..0.999) {
            let p = ModelParams::new(m, alpha).unwrap();
            proptest::prop_assert!((p.psi() * p.chi() - (1.0 - p.chi())).abs() < 1e-12);
            proptest::prop_assert!(p.chi() >= 0.5 && p.chi() < 1.0);
            proptest::prop_assert!(p.psi() > 0.0 && p.psi() <= 1.0);
            proptest::prop_assert!(p.u() >= 0.0);
        }
    }
}
