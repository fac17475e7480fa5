use super::BoxDomain;
use crate::error::{Error, Result};
use crate::fields::SeparableField;

/// `∫_box f` as a sum of products of exact one-dimensional integrals.
pub fn integrate_exact(field: &SeparableField, domain: &BoxDomain) -> Result<f64> {
    if field.dim() != domain.dim() {
        return Err(Error::domain(format!(
            "field of dimension {} on a box of dimension {}",
            field.dim(),
            domain.dim()
        )));
    }
    let mut total = 0.0;
    for product in field.products() {
        let mut value = product.coeff;
        for (factor, &(lo, hi)) in product.factors.iter().zip(domain.bounds()) {
            value *= factor.integrate(lo, hi)?;
            if value == 0.0 {
                break;
            }
        }
        total += value;
    }
    Ok(total)
}
