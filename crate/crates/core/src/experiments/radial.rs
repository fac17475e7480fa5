//! The radial Hessian identity and the scaling family built on it.

use num_rational::Rational64;
use serde::Serialize;

use super::config::{FamilyConfig, FamilyId};
use crate::calculus::quadrature::{integrate_ball, sphere_area, Rule1D, SphereRule};
use crate::error::{Error, Result};
use crate::fields::{Component, MinorField, RadialField, Signal, VectorField};
use crate::hypermatrix::{DetOptions, MinorSpec};
use crate::multiindex::MultiIndex;
use crate::parallel::Workers;
use crate::scalar::rational_to_f64;

/// Radial panels per profile piece.
pub const RADIAL_PANELS: usize = 16;
/// Gauss points per polar angle of the sphere rule.
pub const SPHERE_POLAR: usize = 16;
/// Equispaced azimuth points of the sphere rule.
pub const SPHERE_AZIMUTH: usize = 32;
/// Relative size below which the scaling hypothesis integral counts as zero.
pub const HYPOTHESIS_FLOOR: f64 = 1e-8;

fn one_d_rule(profile: &Signal) -> Rule1D {
    Rule1D::composite(0.0, 1.0, &profile.breakpoints(), 64, 8)
}

/// Both sides of the radial identity for `g(x) = ∫_0^{|x|} h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialIdentity {
    /// Ball quadrature of `M^α_α(D²g) |x|^s`.
    pub lhs: f64,
    /// `I − II + III`.
    pub rhs: f64,
    pub first: f64,
    pub second: f64,
    pub third: f64,
    /// `1 − r/N + (r−N−s)/N`, exact.
    pub coefficient: String,
    /// Whether the coefficient equals `−s/N` exactly.
    pub coefficient_is_minus_s_over_n: bool,
}

impl RadialIdentity {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Radial moment `∫_0^1 h^r ρ^{N+s−r−1} dρ`.
fn radial_moment(h: &Signal, dim: usize, r: usize, s: f64) -> f64 {
    let exponent = dim as f64 + s - r as f64 - 1.0;
    one_d_rule(h).integrate(|t| h.eval(t).powi(r as i32) * t.powf(exponent))
}

/// Combined coefficient of `2π Π I(i) ∫ h^r ρ^{N+s−r−1}` in `I − II + III`.
pub fn radial_coefficient(dim: usize, r: usize, s: Rational64) -> Rational64 {
    let n = Rational64::from_integer(dim as i64);
    let r = Rational64::from_integer(r as i64);
    Rational64::from_integer(1) - r / n + (r - n - s) / n
}

/// Checks `∫ h = 0` for a profile supported in `(0, 1)`.
fn check_zero_mass(h: &Signal) -> Result<()> {
    let rule = one_d_rule(h);
    let mass = rule.integrate(|t| h.eval(t));
    let scale = rule.integrate(|t| h.eval(t).abs());
    if mass.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::config(format!("radial profile must integrate to 0, got {mass:e}")));
    }
    Ok(())
}

fn ball_rule(dim: usize) -> Result<SphereRule> {
    SphereRule::new(dim, SPHERE_POLAR, SPHERE_AZIMUTH)
}

/// `∫_{B(0,1)} M^α_α(D²g) |x|^s` against its assembled radial formula, for
/// `α = (1..r)`.
pub fn radial_hessian_identity(
    h: &Signal,
    dim: usize,
    r: usize,
    s: Rational64,
    workers: Workers,
) -> Result<RadialIdentity> {
    if r < 2 || r > dim {
        return Err(Error::config(format!("need 2 ≤ r ≤ N, got r = {r}, N = {dim}")));
    }
    let g = RadialField::new(h.clone(), dim).map_err(|e| Error::config(e.to_string()))?;
    check_zero_mass(h)?;
    let sf = rational_to_f64(s);
    let alpha = MultiIndex::leading(r, dim)?;
    let spec = MinorSpec::new(vec![alpha.clone(), alpha])?;
    let options = DetOptions::default();
    let sphere = ball_rule(dim)?;
    let lhs = integrate_ball(
        |x| {
            let t = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let hess = g.hessian(x).expect("off the origin");
            hess.minor_det(&spec, &options).expect("fits") * t.powf(sf)
        },
        dim,
        1.0,
        &g.radial_breaks(),
        RADIAL_PANELS,
        &sphere,
        workers,
    );
    let base = sphere_area(dim) * radial_moment(h, dim, r, sf);
    let (n, rf) = (dim as f64, r as f64);
    let first = base;
    let second = rf / n * base;
    let third = (rf - n - sf) / n * base;
    let coefficient = radial_coefficient(dim, r, s);
    Ok(RadialIdentity {
        lhs,
        rhs: first - second + third,
        first,
        second,
        third,
        coefficient: coefficient.to_string(),
        coefficient_is_minus_s_over_n: coefficient == -s / Rational64::from_integer(dim as i64),
    })
}

/// Scaled copies `u_ε = ε^ρ g(x/ε)` of `g = (g', …, g')`, `ε = 1/k`.
#[derive(Debug, Clone)]
pub struct ScalingFamily {
    pub profile: Signal,
    pub rho: f64,
    pub spec: MinorSpec,
    /// `∫_{B(0,1)} M(D²g) |x|^m`.
    pub hypothesis: f64,
    /// Predicted exponents in `ε`.
    pub minor_exponent: Rational64,
    pub norm_exponent: Rational64,
    pub members: Vec<ScaledMember>,
}

#[derive(Debug, Clone)]
pub struct ScaledMember {
    pub k: u64,
    pub epsilon: f64,
    pub field: VectorField,
}

fn replicated(g: &RadialField, n: usize) -> Result<VectorField> {
    VectorField::new(vec![Component::Radial(g.clone()); n])
}

/// `∫_{B(0,radius)} M^β_α(D² u) |x|^m` through the pointwise hyper-Jacobian.
pub fn ball_minor_integral(
    u: &VectorField,
    spec: &MinorSpec,
    weight_power: usize,
    radius: f64,
    breaks: &[f64],
    workers: Workers,
) -> Result<f64> {
    let minor = MinorField::new(u, 2, spec.clone())?;
    let sphere = ball_rule(u.dim())?;
    let failure = std::sync::Mutex::new(None);
    let value = integrate_ball(
        |x| {
            let t2 = x.iter().map(|v| v * v).sum::<f64>();
            match minor.value(x) {
                Ok(v) => v * t2.sqrt().powi(weight_power as i32),
                Err(e) => {
                    failure.lock().expect("poisoned").get_or_insert(e);
                    0.0
                }
            }
        },
        u.dim(),
        radius,
        breaks,
        RADIAL_PANELS,
        &sphere,
        workers,
    );
    match failure.into_inner().expect("poisoned") {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Scaling family around the profile `h`; requires `m = 2` since radial
/// fields carry derivatives up to order two.
pub fn family_prop49(cfg: &FamilyConfig, h: &Signal) -> Result<ScalingFamily> {
    if cfg.family != FamilyId::Prop49 {
        return Err(Error::config(format!("configuration is for {}, not prop49", cfg.family)));
    }
    cfg.validate()?;
    let (n, m, r) = (cfg.dim, cfg.order, cfg.degree);
    if m != 2 {
        return Err(Error::config(format!(
            "prop49 uses a radial field with Hessian minors: m must be 2, got {m}"
        )));
    }
    let g = RadialField::new(h.clone(), n).map_err(|e| Error::config(e.to_string()))?;
    check_zero_mass(h)?;
    let alpha = MultiIndex::leading(r, n)?;
    let spec = MinorSpec::hyper_jacobian(alpha.clone(), vec![alpha; m])?;
    let unit = replicated(&g, n)?;
    let breaks = g.radial_breaks();
    let hypothesis = ball_minor_integral(&unit, &spec, m, 1.0, &breaks, cfg.workers)?;
    let scale = {
        let minor = MinorField::new(&unit, 2, spec.clone())?;
        integrate_ball(
            |x| {
                let t = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                minor.value(x).map_or(0.0, f64::abs) * t.powi(m as i32)
            },
            n,
            1.0,
            &breaks,
            RADIAL_PANELS,
            &ball_rule(n)?,
            cfg.workers,
        )
    };
    if hypothesis.abs() < HYPOTHESIS_FLOOR * scale {
        return Err(Error::config(format!(
            "∫ M(D²g)|x|^m = {hypothesis:e} is indistinguishable from 0 (scale {scale:e})"
        )));
    }
    let rho = cfg.rho()?;
    let (nq, mq, rq) = (
        Rational64::from_integer(n as i64),
        Rational64::from_integer(m as i64),
        Rational64::from_integer(r as i64),
    );
    let rho_f = rational_to_f64(rho);
    let members = cfg
        .ks
        .iter()
        .map(|&k| {
            let epsilon = 1.0 / k as f64;
            let scaled = g.scaled(epsilon, epsilon.powf(rho_f))?;
            Ok(ScaledMember {
                k,
                epsilon,
                field: replicated(&scaled, n)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScalingFamily {
        profile: h.clone(),
        rho: rho_f,
        spec,
        hypothesis,
        minor_exponent: rho * rq - rq * mq + nq + mq,
        norm_exponent: rho + nq / cfg.p - cfg.s,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::radial_default;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn coefficient_is_minus_s_over_n() {
        for n in 2..6 {
            for r in 2..=n {
                for s in 1..4 {
                    assert_eq!(radial_coefficient(n, r, q(s, 1)), q(-s, n as i64));
                }
            }
        }
    }

    #[test]
    fn identity_on_default_profile() {
        let id = radial_hessian_identity(&radial_default(), 3, 2, q(2, 1), Workers::single()).unwrap();
        assert!(id.coefficient_is_minus_s_over_n);
        assert!((id.ratio() - 1.0).abs() < 1e-6, "{id:?}");
    }

    #[test]
    fn nonzero_mass_is_rejected() {
        let bump = Signal::polynomial_on(&[0.0, 1.0, -1.0], 0.0, 1.0)
            .unwrap()
            .product(&Signal::polynomial_on(&[1.0], 0.2, 0.8).unwrap());
        assert!(matches!(
            radial_hessian_identity(&bump, 3, 2, q(2, 1), Workers::single()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn hypothesis_is_replicated_identity() {
        // (g', g', g'): the minor is r! times the Hessian minor of g'
        let cfg = FamilyConfig::defaults(FamilyId::Prop49);
        let fam = family_prop49(&cfg, &radial_default()).unwrap();
        let id = radial_hessian_identity(&radial_default(), 3, 2, q(2, 1), Workers::single()).unwrap();
        assert!((fam.hypothesis - 2.0 * id.lhs).abs() < 1e-9 * id.lhs.abs());
        assert_eq!(fam.minor_exponent, q(-1, 1));
        assert_eq!(fam.norm_exponent, q(1, 2));
    }

    #[test]
    fn scaling_law_is_exact() {
        let cfg = FamilyConfig::defaults(FamilyId::Prop49);
        let fam = family_prop49(&cfg, &radial_default()).unwrap();
        let breaks: Vec<f64> = radial_default().breakpoints();
        for member in &fam.members[..2] {
            let eps = member.epsilon;
            let scaled: Vec<f64> = breaks.iter().map(|b| b * eps).collect();
            let v = ball_minor_integral(&member.field, &fam.spec, 2, eps, &scaled, Workers::single()).unwrap();
            let want = eps.powi(-1) * fam.hypothesis;
            assert!((v - want).abs() < 1e-9 * want.abs(), "{v} {want}");
        }
    }

    #[test]
    fn first_order_family_is_rejected() {
        let mut cfg = FamilyConfig::defaults(FamilyId::Prop49);
        cfg.order = 1;
        cfg.rho = Some(q(-1, 1));
        assert!(family_prop49(&cfg, &radial_default()).is_err());
    }
}
