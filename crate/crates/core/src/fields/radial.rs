//! Radial fields `x ↦ A · G(|x| / ε)` with `G(t) = ∫_0^t h`.

use super::signal::Signal;
use crate::calculus::quadrature::Rule1D;
use crate::error::{Error, Result};
use crate::hypermatrix::HyperMatrix;
use crate::multiindex::MultiIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    profile: Signal,
    derivative: Signal,
    dim: usize,
    scale: f64,
    amplitude: f64,
}

impl RadialField {
    /// `profile` must vanish outside a closed subinterval of `(0, 1)`.
    pub fn new(profile: Signal, dim: usize) -> Result<Self> {
        let (lo, hi) = profile
            .support()
            .ok_or_else(|| Error::domain("radial profile is identically zero"))?;
        if !(lo > 0.0 && hi < 1.0) {
            return Err(Error::domain(format!(
                "radial profile support [{lo}, {hi}] is not inside (0, 1)"
            )));
        }
        if dim == 0 {
            return Err(Error::domain("radial field needs a positive dimension"));
        }
        let derivative = profile.derivative();
        Ok(RadialField {
            profile,
            derivative,
            dim,
            scale: 1.0,
            amplitude: 1.0,
        })
    }

    /// `x ↦ amplitude · g(x / scale)`.
    pub fn scaled(&self, scale: f64, amplitude: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::domain(format!("scale {scale} must be positive")));
        }
        Ok(RadialField {
            scale: self.scale * scale,
            amplitude: self.amplitude * amplitude,
            ..self.clone()
        })
    }

    pub fn profile(&self) -> &Signal {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Radius outside which the field is constant.
    pub fn support_radius(&self) -> f64 {
        self.profile.support().map_or(0.0, |(_, hi)| hi) * self.scale
    }

    /// Radii where the profile changes piece, in `x` units.
    pub fn radial_breaks(&self) -> Vec<f64> {
        self.profile
            .breakpoints()
            .into_iter()
            .map(|b| b * self.scale)
            .collect()
    }

    fn local(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let y: Vec<f64> = x.iter().map(|v| v / self.scale).collect();
        let t = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        (y, t)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let (_, t) = self.local(x);
        self.amplitude * self.profile.integrate(0.0, t).expect("bounded profile")
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (y, t) = self.local(x);
        if t == 0.0 {
            return vec![0.0; self.dim];
        }
        let factor = self.amplitude * self.profile.eval(t) / (t * self.scale);
        y.iter().map(|v| factor * v).collect()
    }

    /// `D²` in closed form, `(h t² δ_ij + (h' t - h) y_i y_j) / t³` in the
    /// scaled variable `y = x / ε`.
    pub fn hessian(&self, x: &[f64]) -> Result<HyperMatrix<f64>> {
        let (y, t) = self.local(x);
        if t == 0.0 {
            return Err(Error::domain("the Hessian is not represented at the origin"));
        }
        let h = self.profile.eval(t);
        let dh = self.derivative.eval(t);
        let outer = self.amplitude / (self.scale * self.scale) / t.powi(3);
        HyperMatrix::from_fn(vec![self.dim, self.dim], |ix| {
            let (i, j) = (ix[0] - 1, ix[1] - 1);
            let diag = if i == j { h * t * t } else { 0.0 };
            outer * (diag + (dh * t - h) * y[i] * y[j])
        })
    }

    /// Mixed partial of order at most two.
    pub fn partial_value(&self, axes: &[usize], x: &[f64]) -> Result<f64> {
        for &a in axes {
            if a == 0 || a > self.dim {
                return Err(Error::domain(format!("axis {a} outside 1..={}", self.dim)));
            }
        }
        match axes.len() {
            0 => Ok(self.eval(x)),
            1 => Ok(self.gradient(x)[axes[0] - 1]),
            2 => {
                let (_, t) = self.local(x);
                if t == 0.0 {
                    // constant near the origin since the profile vanishes there
                    return Ok(0.0);
                }
                Ok(*self.hessian(x)?.get(&[axes[0], axes[1]])?)
            }
            n => Err(Error::domain(format!(
                "radial fields provide derivatives up to order 2, not {n}"
            ))),
        }
    }

    /// `M^α_α(D² g)(x)` by the rank-one update of `h t² I`.
    pub fn hessian_minor(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
        let (y, t) = self.local(x);
        if t == 0.0 {
            return Err(Error::domain("the Hessian minor is not represented at the origin"));
        }
        if alpha.entries().iter().any(|&i| i > self.dim) {
            return Err(Error::domain(format!("{alpha} exceeds dimension {}", self.dim)));
        }
        let r = alpha.len() as i32;
        if r == 0 {
            return Ok(1.0);
        }
        let h = self.profile.eval(t);
        let dh = self.derivative.eval(t);
        let selected: f64 = alpha.entries().iter().map(|&i| y[i - 1] * y[i - 1]).sum();
        let value = h.powi(r) * t.powi(2 * r) - h.powi(r) * t.powi(2 * r - 2) * selected
            + h.powi(r - 1) * dh * t.powi(2 * r - 1) * selected;
        let outer = (self.amplitude / (self.scale * self.scale)).powi(r);
        Ok(outer * value / t.powi(3 * r))
    }

    /// Confirms `∫_0^1 h = 0` and `∫_0^1 h^r ρ^{N+s-r-1} ≠ 0` by 1-D
    /// quadrature; returns the second integral.
    pub fn check_admissible(&self, r: usize, s: f64) -> Result<f64> {
        let rule = Rule1D::composite(0.0, 1.0, &self.profile.breakpoints(), 64, 8);
        let h = &self.profile;
        let mass = rule.integrate(|t| h.eval(t));
        let abs_mass = rule.integrate(|t| h.eval(t).abs());
        if mass.abs() > 1e-10 * abs_mass.max(1e-300) {
            return Err(Error::config(format!(
                "radial profile must integrate to 0, got {mass:e}"
            )));
        }
        let exponent = self.dim as f64 + s - r as f64 - 1.0;
        let weighted = rule.integrate(|t| h.eval(t).powi(r as i32) * t.powf(exponent));
        let scale = rule.integrate(|t| h.eval(t).abs().powi(r as i32) * t.powf(exponent));
        if weighted.abs() <= 1e-10 * scale.max(1e-300) {
            return Err(Error::config(
                "radial profile gives a vanishing weighted moment",
            ));
        }
        Ok(weighted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::profiles::radial_default;
    use crate::hypermatrix::{DetOptions, MinorSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_minor_matches_determinant() {
        let g = RadialField::new(radial_default(), 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let alphas = [vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3], vec![2]];
        let mut checked = 0;
        while checked < 100 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-0.8..0.8)).collect();
            let t = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(0.21..0.79).contains(&t) {
                continue;
            }
            let hess = g.hessian(&x).unwrap();
            for a in &alphas {
                let alpha = MultiIndex::new(a.clone(), 3).unwrap();
                let spec = MinorSpec::new(vec![alpha.clone(), alpha.clone()]).unwrap();
                let direct = hess.minor_det(&spec, &DetOptions::default()).unwrap();
                let closed = g.hessian_minor(&alpha, &x).unwrap();
                let scale = direct.abs().max(hess.max_abs().powi(a.len() as i32));
                assert!((direct - closed).abs() <= 1e-10 * scale, "{direct} vs {closed}");
            }
            checked += 1;
        }
    }

    #[test]
    fn degree_one_minor_is_hessian_entry() {
        let g = RadialField::new(radial_default(), 2).unwrap();
        let x = [0.3, -0.25];
        let alpha = MultiIndex::single(2, 2).unwrap();
        let entry = *g.hessian(&x).unwrap().get(&[2, 2]).unwrap();
        assert!((g.hessian_minor(&alpha, &x).unwrap() - entry).abs() < 1e-12);
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let g = RadialField::new(radial_default(), 3).unwrap().scaled(0.5, 2.0).unwrap();
        let x = [0.1, 0.15, -0.12];
        let h = 1e-4;
        let hess = g.hessian(&x).unwrap();
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let gp = g.gradient(&xp);
            let gm = g.gradient(&xm);
            for j in 0..3 {
                let fd = (gp[j] - gm[j]) / (2.0 * h);
                let exact = *hess.get(&[j + 1, i + 1]).unwrap();
                assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()));
            }
            let fd = (g.eval(&xp) - g.eval(&xm)) / (2.0 * h);
            assert!((fd - g.gradient(&x)[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn origin_and_admissibility() {
        let g = RadialField::new(radial_default(), 3).unwrap();
        assert!(g.hessian(&[0.0; 3]).is_err());
        assert!(g.partial_value(&[1, 2, 3], &[0.1, 0.1, 0.1]).is_err());
        assert!(g.check_admissible(2, 2.0).unwrap() > 0.0);
        let positive = Signal::polynomial_on(&[1.0], 0.2, 0.4).unwrap();
        let bad = RadialField::new(positive, 3).unwrap();
        assert!(matches!(bad.check_admissible(2, 2.0), Err(Error::Config(_))));
        assert!(RadialField::new(Signal::constant(1.0), 3).is_err());
    }
}
