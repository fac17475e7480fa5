//! Moving the derivatives of a hyper-Jacobian minor onto the test function
//! through extensions in `m` extra variables.

use serde::Serialize;

use super::exact::integrate_exact;
use super::BoxDomain;
use crate::error::{Error, Result};
use crate::fields::{check_extension_profile, MinorField, SeparableField, Signal, VectorField};
use crate::hypermatrix::MinorSpec;
use crate::multiindex::{sigma, MultiIndex, Sign};

/// Both sides of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IbpCheck {
    /// `∫_Ω M^β_α(D^m u) ψ`.
    pub lhs: f64,
    /// `Σ_I (−1)^m σ(α̃ − I, I) ∫_{Ω×[0,1)^m} M^β_{α̃−I}(D^m U) ∂_I Ψ`.
    pub rhs: f64,
    /// Number of index tuples `I` in the sum.
    pub terms: usize,
}

impl IbpCheck {
    pub fn relative_error(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).abs() / scale
        }
    }
}

/// Evaluates both sides exactly with `U = u · Π χ(t_j)` and
/// `Ψ = ψ · Π χ(t_j)`. `ψ` must vanish near the boundary of `domain`.
pub fn ibp_identity_check(
    u: &VectorField,
    psi: &SeparableField,
    order: usize,
    spec: &MinorSpec,
    chi: &Signal,
    domain: &BoxDomain,
) -> Result<IbpCheck> {
    check_extension_profile(chi)?;
    let dim = u.dim();
    if psi.dim() != dim || domain.dim() != dim {
        return Err(Error::domain("field, test function and box dimensions differ"));
    }
    if order == 0 || spec.dims() != order + 1 {
        return Err(Error::domain(format!(
            "an order-{order} identity needs {} selectors",
            order + 1
        )));
    }
    let minor = MinorField::new(u, order, spec.clone())?;
    let lhs = integrate_exact(&minor.expand()?.product(psi), domain)?;

    let extra = vec![chi.clone(); order];
    let lifted = VectorField::separable(
        u.separable_components()?
            .into_iter()
            .map(|c| c.extend_with(&extra))
            .collect(),
    )?;
    let test = psi.extend_with(&extra);
    let wide = domain.extended(&vec![(0.0, 1.0); order])?;
    let ambient = dim + order;

    // α̃^s = α^s ∪ {N + s}
    let shifted: Vec<MultiIndex> = spec.selectors()[1..]
        .iter()
        .enumerate()
        .map(|(s, a)| a.widen(ambient)?.insert(dim + s + 1))
        .collect::<Result<_>>()?;
    let beta = spec.selectors()[0].clone();
    let base_sign = spec.sign() * Sign::from_parity(order % 2 == 1);

    let mut rhs = 0.0;
    let mut terms = 0;
    let mut choice = vec![0usize; order];
    loop {
        let mut sign = base_sign;
        let mut reduced = Vec::with_capacity(order);
        let mut axes = Vec::with_capacity(order);
        for (a, &c) in shifted.iter().zip(&choice) {
            let i = a.entries()[c];
            let rest = a.remove(i)?;
            sign = sign * sigma(&rest, &MultiIndex::single(i, ambient)?)?;
            reduced.push(rest);
            axes.push(i);
        }
        let term_spec = MinorSpec::hyper_jacobian(beta.clone(), reduced)?;
        let m = MinorField::new(&lifted, order, term_spec)?.expand()?;
        let d_test = test.partial(&axes)?;
        rhs += sign.apply(integrate_exact(&m.product(&d_test), &wide)?);
        terms += 1;

        let mut k = order;
        loop {
            if k == 0 {
                return Ok(IbpCheck { lhs, rhs, terms });
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < shifted[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{extension_default, extension_power, plateau_field};
    use num_rational::Rational64;
    use std::f64::consts::PI;

    fn sin_sin() -> SeparableField {
        SeparableField::from_factors(1.0, vec![Signal::sin(1.0, 1.0, Rational64::from_integer(0)); 2])
    }

    fn bilinear() -> SeparableField {
        SeparableField::from_factors(1.0, vec![Signal::monomial(1.0, 1); 2])
    }

    #[test]
    fn first_order_identity() {
        let skew = SeparableField::from_factors(1.0, vec![Signal::monomial(1.0, 2), Signal::monomial(1.0, 1)]);
        let wave = SeparableField::from_factors(
            1.0,
            vec![Signal::cos(1.0, 2.0, Rational64::new(1, 3)), Signal::monomial(1.0, 3)],
        );
        let u = VectorField::separable(vec![sin_sin().add(&wave), skew]).unwrap();
        let psi = plateau_field(2, 2);
        let omega = BoxDomain::cube(2, 0.0, PI).unwrap();
        let spec = MinorSpec::full(2, 2).unwrap();
        for chi in [extension_default(1), extension_power(1, 0.5).unwrap()] {
            let check = ibp_identity_check(&u, &psi, 1, &spec, &chi, &omega).unwrap();
            assert_eq!(check.terms, 3);
            assert!(check.lhs.abs() > 1e-3, "{check:?}");
            assert!(check.relative_error() < 1e-8, "{check:?}");
        }
    }

    #[test]
    fn second_order_identity() {
        let u = VectorField::separable(vec![sin_sin(), bilinear().add(&sin_sin().scaled(0.3))]).unwrap();
        let psi = plateau_field(2, 3);
        let omega = BoxDomain::cube(2, 0.0, PI).unwrap();
        let full = MultiIndex::leading(2, 2).unwrap();
        let spec = MinorSpec::hyper_jacobian(full.clone(), vec![full.clone(), full]).unwrap();
        let check = ibp_identity_check(&u, &psi, 2, &spec, &extension_default(2), &omega).unwrap();
        assert!(check.relative_error() < 1e-8, "{check:?}");
    }

    #[test]
    fn vanishing_cases() {
        let omega = BoxDomain::cube(2, 0.0, PI).unwrap();
        let v = sin_sin().add(&bilinear());
        let u = VectorField::separable(vec![v.clone(), v]).unwrap();
        let spec = MinorSpec::full(2, 2).unwrap();
        let check = ibp_identity_check(&u, &plateau_field(2, 2), 1, &spec, &extension_default(1), &omega).unwrap();
        assert!(check.lhs.abs() < 1e-12 && check.rhs.abs() < 1e-12);
        let u = VectorField::separable(vec![sin_sin(), bilinear()]).unwrap();
        let check =
            ibp_identity_check(&u, &SeparableField::zero(2), 1, &spec, &extension_default(1), &omega).unwrap();
        assert_eq!((check.lhs, check.rhs), (0.0, 0.0));
    }

    #[test]
    fn rejects_profiles_reaching_one() {
        let omega = BoxDomain::cube(2, 0.0, PI).unwrap();
        let u = VectorField::separable(vec![sin_sin(), bilinear()]).unwrap();
        let spec = MinorSpec::full(2, 2).unwrap();
        let bad = Signal::polynomial_on(&[1.0, -1.0], 0.0, 1.0).unwrap();
        assert!(matches!(
            ibp_identity_check(&u, &plateau_field(2, 2), 1, &spec, &bad, &omega),
            Err(Error::Domain(_))
        ));
    }
}
