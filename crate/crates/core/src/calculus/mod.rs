//! Integration over boxes and balls, fractional Sobolev norms and the
//! integration-by-parts identity for hyper-Jacobian minors.

mod exact;
mod ibp;
pub mod quadrature;
mod sobolev;

pub use exact::integrate_exact;
pub use ibp::{ibp_identity_check, IbpCheck};
pub use quadrature::{integrate_quadrature, QuadratureSpec, ScalarField, SphereRule};
pub use sobolev::{
    gagliardo_seminorm, interpolation_ratio, lp_norm, sobolev_norm, DerivativeBundle,
    DiagonalCorrection, GagliardoSpec, SobolevNorm, VectorSampler,
};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;

/// Axis-aligned box `Π (lo_i, hi_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    bounds: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::domain("a box needs at least one axis"));
        }
        for &(lo, hi) in &bounds {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::domain(format!("invalid box side ({lo}, {hi})")));
            }
        }
        Ok(BoxDomain { bounds })
    }

    /// `(lo, hi)^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        BoxDomain::new(vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|(a, b)| b - a).product()
    }

    /// Product with further axes.
    pub fn extended(&self, extra: &[(f64, f64)]) -> Result<BoxDomain> {
        let mut bounds = self.bounds.clone();
        bounds.extend_from_slice(extra);
        BoxDomain::new(bounds)
    }
}

/// Smoothness `s ≥ 0` and integrability `p > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevParams {
    s: Rational64,
    p: Rational64,
}

impl SobolevParams {
    pub fn new(s: Rational64, p: Rational64) -> Result<Self> {
        if s < Rational64::from_integer(0) {
            return Err(Error::domain(format!("s = {s} must be non-negative")));
        }
        if p <= Rational64::from_integer(1) {
            return Err(Error::domain(format!("p = {p} must exceed 1")));
        }
        Ok(SobolevParams { s, p })
    }

    pub fn s(&self) -> Rational64 {
        self.s
    }

    pub fn p(&self) -> Rational64 {
        self.p
    }

    pub fn s_f64(&self) -> f64 {
        rational_to_f64(self.s)
    }

    pub fn p_f64(&self) -> f64 {
        rational_to_f64(self.p)
    }

    /// `[s]`.
    pub fn integer_part(&self) -> usize {
        self.s.floor().to_integer() as usize
    }

    /// `s - [s]`.
    pub fn fractional_part(&self) -> Rational64 {
        self.s - self.s.floor()
    }

    /// Interpolation weight `θ` with `s = θ s1 + (1 - θ) s2`.
    pub fn theta(s: f64, s1: f64, s2: f64) -> Result<f64> {
        if s1 == s2 {
            return Err(Error::domain("interpolation endpoints coincide"));
        }
        Ok((s - s2) / (s1 - s2))
    }
}
