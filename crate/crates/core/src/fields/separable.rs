//! Sums of products of univariate signals.

use super::signal::Signal;
use crate::error::{Error, Result};

/// `coeff · Π_axis factors[axis](x_axis)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub coeff: f64,
    pub factors: Vec<Signal>,
}

impl Product {
    fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.coeff;
        for (f, &xi) in self.factors.iter().zip(x) {
            if v == 0.0 {
                break;
            }
            v *= f.eval(xi);
        }
        v
    }

    fn is_zero(&self) -> bool {
        self.coeff == 0.0 || self.factors.iter().any(Signal::is_zero)
    }
}

/// Scalar field on `R^N` given as a sum of separable products.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableField {
    dim: usize,
    products: Vec<Product>,
}

impl SeparableField {
    pub fn new(dim: usize, products: Vec<Product>) -> Result<Self> {
        if let Some(p) = products.iter().find(|p| p.factors.len() != dim) {
            return Err(Error::domain(format!(
                "product has {} factors in dimension {dim}",
                p.factors.len()
            )));
        }
        Ok(SeparableField {
            dim,
            products: products.into_iter().filter(|p| !p.is_zero()).collect(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        SeparableField {
            dim,
            products: Vec::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        SeparableField::from_factors(c, vec![Signal::constant(1.0); dim])
    }

    pub fn from_factors(coeff: f64, factors: Vec<Signal>) -> Self {
        let dim = factors.len();
        SeparableField::new(dim, vec![Product { coeff, factors }]).expect("consistent dimension")
    }

    /// `signal(x_axis)` with every other factor equal to 1 (1-based axis).
    pub fn along(dim: usize, axis: usize, signal: Signal) -> Result<Self> {
        if axis == 0 || axis > dim {
            return Err(Error::domain(format!("axis {axis} outside 1..={dim}")));
        }
        let mut factors = vec![Signal::constant(1.0); dim];
        factors[axis - 1] = signal;
        Ok(SeparableField::from_factors(1.0, factors))
    }

    /// `|x|^2 = Σ x_i^2`.
    pub fn norm_squared(dim: usize) -> Self {
        let mut out = SeparableField::zero(dim);
        for axis in 1..=dim {
            out = out.add(
                &SeparableField::along(dim, axis, Signal::monomial(1.0, 2)).expect("axis in range"),
            );
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn is_zero(&self) -> bool {
        self.products.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.products.iter().map(|p| p.eval(x)).sum()
    }

    /// Σ |product(x)|, the scale against which rounding is judged.
    pub fn magnitude(&self, x: &[f64]) -> f64 {
        self.products
            .iter()
            .map(|p| {
                p.coeff.abs()
                    * p.factors
                        .iter()
                        .zip(x)
                        .map(|(f, &xi)| f.magnitude(xi))
                        .product::<f64>()
            })
            .sum()
    }

    /// Mixed partial along a multiset of 1-based axes.
    pub fn partial(&self, axes: &[usize]) -> Result<SeparableField> {
        let mut counts = vec![0usize; self.dim];
        for &a in axes {
            if a == 0 || a > self.dim {
                return Err(Error::domain(format!("axis {a} outside 1..={}", self.dim)));
            }
            counts[a - 1] += 1;
        }
        let products = self
            .products
            .iter()
            .map(|p| Product {
                coeff: p.coeff,
                factors: p
                    .factors
                    .iter()
                    .zip(&counts)
                    .map(|(f, &c)| f.nth_derivative(c))
                    .collect(),
            })
            .filter(|p| !p.is_zero())
            .collect();
        Ok(SeparableField {
            dim: self.dim,
            products,
        })
    }

    pub fn add(&self, other: &SeparableField) -> SeparableField {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut products = self.products.clone();
        products.extend(other.products.iter().cloned());
        SeparableField {
            dim: self.dim,
            products,
        }
    }

    pub fn scaled(&self, c: f64) -> SeparableField {
        if c == 0.0 {
            return SeparableField::zero(self.dim);
        }
        SeparableField {
            dim: self.dim,
            products: self
                .products
                .iter()
                .map(|p| Product {
                    coeff: p.coeff * c,
                    factors: p.factors.clone(),
                })
                .collect(),
        }
    }

    pub fn product(&self, other: &SeparableField) -> SeparableField {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut products = Vec::with_capacity(self.products.len() * other.products.len());
        for a in &self.products {
            for b in &other.products {
                let p = Product {
                    coeff: a.coeff * b.coeff,
                    factors: a
                        .factors
                        .iter()
                        .zip(&b.factors)
                        .map(|(f, g)| f.product(g))
                        .collect(),
                };
                if !p.is_zero() {
                    products.push(p);
                }
            }
        }
        SeparableField {
            dim: self.dim,
            products,
        }
    }

    /// Appends axes carrying the given factors (same for every product).
    pub fn extend_with(&self, extra: &[Signal]) -> SeparableField {
        SeparableField {
            dim: self.dim + extra.len(),
            products: self
                .products
                .iter()
                .map(|p| {
                    let mut factors = p.factors.clone();
                    factors.extend(extra.iter().cloned());
                    Product {
                        coeff: p.coeff,
                        factors,
                    }
                })
                .filter(|p| !p.is_zero())
                .collect(),
        }
    }

    /// `x ↦ f(x / eps)`.
    pub fn rescaled(&self, eps: f64) -> Result<SeparableField> {
        let products = self
            .products
            .iter()
            .map(|p| {
                Ok(Product {
                    coeff: p.coeff,
                    factors: p
                        .factors
                        .iter()
                        .map(|f| f.rescale(eps))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(SeparableField {
            dim: self.dim,
            products,
        })
    }

    /// Largest frequency along a 1-based axis.
    pub fn max_frequency(&self, axis: usize) -> f64 {
        self.products
            .iter()
            .map(|p| p.factors[axis - 1].max_frequency())
            .fold(0.0, f64::max)
    }

    pub fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .products
            .iter()
            .flat_map(|p| p.factors[axis - 1].breakpoints())
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn term_count(&self) -> usize {
        self.products
            .iter()
            .map(|p| p.factors.iter().map(Signal::term_count).product::<usize>())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn zero_phase() -> Rational64 {
        Rational64::from_integer(0)
    }

    #[test]
    fn mixed_partial_of_sines() {
        let f = SeparableField::from_factors(
            1.0,
            vec![Signal::sin(1.0, 1.0, zero_phase()), Signal::sin(1.0, 1.0, zero_phase())],
        );
        let d = f.partial(&[1, 2]).unwrap();
        for x in [[0.3, 1.1], [2.0, -0.5]] {
            assert!((d.eval(&x) - x[0].cos() * x[1].cos()).abs() < 1e-15);
        }
        assert_eq!(
            f.partial(&[1, 2]).unwrap().eval(&[0.7, 0.2]),
            f.partial(&[2, 1]).unwrap().eval(&[0.7, 0.2])
        );
    }

    #[test]
    fn second_partial_of_polynomial_factor() {
        let f = SeparableField::from_factors(
            1.0,
            vec![Signal::monomial(1.0, 2), Signal::sin(1.0, 3.0, zero_phase())],
        );
        let d = f.partial(&[1, 1]).unwrap();
        for x in [[0.3, 1.1], [2.0, -0.5]] {
            assert!((d.eval(&x) - 2.0 * (3.0 * x[1]).sin()).abs() < 1e-14);
        }
        assert!(f.partial(&[1, 1, 1]).unwrap().is_zero());
    }

    #[test]
    fn products_and_extensions() {
        let f = SeparableField::along(2, 1, Signal::sin(2.0, 1.0, zero_phase())).unwrap();
        let g = SeparableField::norm_squared(2);
        let fg = f.product(&g).add(&f);
        let x = [0.4, -1.3];
        assert!((fg.eval(&x) - f.eval(&x) * (g.eval(&x) + 1.0)).abs() < 1e-14);
        let e = f.extend_with(&[Signal::monomial(1.0, 1)]);
        assert_eq!(e.dim(), 3);
        assert!((e.eval(&[0.4, -1.3, 2.0]) - 2.0 * f.eval(&x)).abs() < 1e-15);
        assert!(SeparableField::along(2, 3, Signal::constant(1.0)).is_err());
    }
}
