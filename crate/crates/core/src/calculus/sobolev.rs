//! `L^p` norms, Gagliardo seminorms and full `W^{s,p}` norms.

use serde::Serialize;

use super::quadrature::{box_rules, sphere_area, tensor_sum, QuadratureSpec, ScalarField, SphereRule};
use super::{BoxDomain, SobolevParams};
use crate::error::{Error, Result};
use crate::fields::{Component, RadialField, SeparableField, VectorField};
use crate::parallel::{map_chunks, Workers};

/// A vector-valued function sampled pointwise.
pub trait VectorSampler: Sync {
    fn dim(&self) -> usize;
    fn components(&self) -> usize;
    /// Writes the value at `x` into `out` (length `components()`).
    fn sample(&self, x: &[f64], out: &mut [f64]);
    /// Largest angular frequency along a 1-based axis.
    fn max_frequency(&self, axis: usize) -> f64;
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let _ = axis;
        Vec::new()
    }
    /// Row-major `components × dim` Jacobian, central differences unless
    /// overridden.
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let n = self.components();
        let dim = self.dim();
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        let mut y = x.to_vec();
        for a in 0..dim {
            let h = 1e-5 * (1.0 + x[a].abs());
            y[a] = x[a] + h;
            self.sample(&y, &mut plus);
            y[a] = x[a] - h;
            self.sample(&y, &mut minus);
            y[a] = x[a];
            for c in 0..n {
                out[c * dim + a] = (plus[c] - minus[c]) / (2.0 * h);
            }
        }
    }
}

enum Entry {
    Symbolic {
        value: SeparableField,
        gradient: Vec<SeparableField>,
    },
    Radial {
        field: RadialField,
        axes: Vec<usize>,
    },
}

/// All ordered order-`j` partials `∂_{a_1}⋯∂_{a_j} u^c` of a vector field,
/// seen as one vector with `n · N^j` entries.
pub struct DerivativeBundle {
    dim: usize,
    order: usize,
    entries: Vec<Entry>,
}

impl DerivativeBundle {
    pub fn new(u: &VectorField, order: usize) -> Result<Self> {
        let dim = u.dim();
        let mut entries = Vec::new();
        for comp in u.components() {
            for axes in ordered_tuples(dim, order) {
                entries.push(match comp {
                    Component::Separable(f) => {
                        let value = f.partial(&axes)?;
                        let gradient = (1..=dim).map(|a| value.partial(&[a])).collect::<Result<_>>()?;
                        Entry::Symbolic { value, gradient }
                    }
                    Component::Radial(g) => {
                        if order > 2 {
                            return Err(Error::domain(format!(
                                "radial fields provide derivatives up to order 2, not {order}"
                            )));
                        }
                        Entry::Radial {
                            field: g.clone(),
                            axes,
                        }
                    }
                });
            }
        }
        Ok(DerivativeBundle { dim, order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

fn ordered_tuples(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..order {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=dim).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

impl VectorSampler for DerivativeBundle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn components(&self) -> usize {
        self.entries.len()
    }

    fn sample(&self, x: &[f64], out: &mut [f64]) {
        for (o, e) in out.iter_mut().zip(&self.entries) {
            *o = match e {
                Entry::Symbolic { value, .. } => value.eval(x),
                Entry::Radial { field, axes } => {
                    if axes.is_empty() {
                        field.eval(x)
                    } else {
                        field.partial_value(axes, x).unwrap_or(0.0)
                    }
                }
            };
        }
    }

    fn max_frequency(&self, axis: usize) -> f64 {
        self.entries
            .iter()
            .map(|e| match e {
                Entry::Symbolic { value, .. } => value.max_frequency(axis),
                Entry::Radial { .. } => 0.0,
            })
            .fold(0.0, f64::max)
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .entries
            .iter()
            .flat_map(|e| match e {
                Entry::Symbolic { value, .. } => value.breakpoints(axis),
                Entry::Radial { .. } => Vec::new(),
            })
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let dim = self.dim;
        for (c, e) in self.entries.iter().enumerate() {
            let row = &mut out[c * dim..(c + 1) * dim];
            match e {
                Entry::Symbolic { gradient, .. } => {
                    for (o, g) in row.iter_mut().zip(gradient) {
                        *o = g.eval(x);
                    }
                }
                Entry::Radial { field, axes } if axes.len() < 2 => {
                    for (a, o) in row.iter_mut().enumerate() {
                        let mut ax = axes.clone();
                        ax.push(a + 1);
                        *o = field.partial_value(&ax, x).unwrap_or(0.0);
                    }
                }
                Entry::Radial { field, axes } => {
                    let f = |y: &[f64]| field.partial_value(axes, y).unwrap_or(0.0);
                    let mut y = x.to_vec();
                    for (a, o) in row.iter_mut().enumerate() {
                        let h = 1e-5 * (1.0 + x[a].abs());
                        y[a] = x[a] + h;
                        let fp = f(&y);
                        y[a] = x[a] - h;
                        let fm = f(&y);
                        y[a] = x[a];
                        *o = (fp - fm) / (2.0 * h);
                    }
                }
            }
        }
    }
}

/// `|V(x)|^p` with the Euclidean norm over components.
struct PowerOfNorm<'a> {
    sampler: &'a dyn VectorSampler,
    p: f64,
}

impl ScalarField for PowerOfNorm<'_> {
    fn dim(&self) -> usize {
        self.sampler.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let mut v = vec![0.0; self.sampler.components()];
        self.sampler.sample(x, &mut v);
        let q: f64 = v.iter().map(|a| a * a).sum();
        q.powf(self.p / 2.0)
    }
    fn max_frequency(&self, axis: usize) -> f64 {
        self.sampler.max_frequency(axis)
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        self.sampler.breakpoints(axis)
    }
}

/// `(∫_box |V|^p)^{1/p}`.
pub fn lp_norm(sampler: &dyn VectorSampler, p: f64, domain: &BoxDomain, spec: &QuadratureSpec) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("p = {p} must be at least 1")));
    }
    let integrand = PowerOfNorm { sampler, p };
    let rules = box_rules(&integrand, domain, spec)?;
    Ok(tensor_sum(&rules, spec.workers, |x| integrand.eval(x)).powf(1.0 / p))
}

/// What replaces the excluded near-diagonal cells of the pair grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagonalCorrection {
    /// Pure exclusion; underestimates.
    #[default]
    None,
    /// Adds the contribution of the local linear model `V(y) ≈ V(x) + J(x)(y-x)`
    /// over the ball with the same volume as the excluded offsets.
    Gradient,
}

/// Midpoint pair-grid settings for the double integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GagliardoSpec {
    pub cells_per_axis: usize,
    pub correction: DiagonalCorrection,
    /// Guard: minimum cells per wavelength of the fastest oscillation.
    pub min_cells_per_wavelength: f64,
    /// Upper limit on unordered cell pairs.
    pub max_pairs: u128,
    pub workers: Workers,
}

impl Default for GagliardoSpec {
    fn default() -> Self {
        GagliardoSpec {
            cells_per_axis: 48,
            correction: DiagonalCorrection::None,
            min_cells_per_wavelength: 4.0,
            max_pairs: 8_000_000_000,
            workers: Workers::single(),
        }
    }
}

impl GagliardoSpec {
    pub fn with_cells(mut self, cells: usize) -> Self {
        self.cells_per_axis = cells;
        self
    }

    pub fn with_correction(mut self, correction: DiagonalCorrection) -> Self {
        self.correction = correction;
        self
    }

    pub fn with_workers(mut self, workers: Workers) -> Self {
        self.workers = workers;
        self
    }
}

/// `(∫∫ |V(x) − V(y)|^p / |x − y|^{N + σp})^{1/p}` over `box × box` for a
/// fractional order `0 < σ < 1`.
pub fn gagliardo_seminorm(
    sampler: &dyn VectorSampler,
    sigma: f64,
    p: f64,
    domain: &BoxDomain,
    spec: &GagliardoSpec,
) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::domain(format!(
            "fractional order {sigma} is not in (0, 1); integer orders use the L^p path"
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::domain(format!("p = {p} must be at least 1")));
    }
    let dim = domain.dim();
    if sampler.dim() != dim {
        return Err(Error::domain("sampler and box dimensions differ"));
    }
    let n = spec.cells_per_axis;
    if n < 2 {
        return Err(Error::config("the pair grid needs at least 2 cells per axis"));
    }
    for (axis, &(lo, hi)) in domain.bounds().iter().enumerate() {
        let waves = sampler.max_frequency(axis + 1) * (hi - lo) / (2.0 * std::f64::consts::PI);
        let required = (spec.min_cells_per_wavelength * waves).ceil() as usize;
        if required > n {
            return Err(Error::Resolution {
                axis: axis + 1,
                required,
                available: n,
            });
        }
    }
    let cells = (n as u128).pow(dim as u32);
    let pairs = cells * (cells - 1) / 2;
    if pairs > spec.max_pairs {
        return Err(Error::Budget {
            required: pairs,
            budget: spec.max_pairs,
        });
    }

    let widths: Vec<f64> = domain.bounds().iter().map(|(lo, hi)| (hi - lo) / n as f64).collect();
    let cell_volume: f64 = widths.iter().product();
    let diagonal = widths.iter().map(|w| w * w).sum::<f64>().sqrt();
    let comps = sampler.components();
    let total = n.pow(dim as u32);
    let mut strides = vec![1usize; dim];
    for a in (0..dim.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * n;
    }

    let mut values = vec![0.0; total * comps];
    let mut x = vec![0.0; dim];
    for (c, chunk) in values.chunks_mut(comps).enumerate() {
        midpoint(c, &strides, domain, &widths, &mut x);
        sampler.sample(&x, chunk);
    }

    // Offsets in the positive half space: first nonzero coordinate positive.
    let span = 2 * n - 1;
    let mut offsets = Vec::new();
    let mut excluded = 0usize;
    for flat in 0..span.pow(dim as u32) {
        let mut rem = flat;
        let mut o = vec![0i64; dim];
        for a in (0..dim).rev() {
            o[a] = (rem % span) as i64 - (n as i64 - 1);
            rem /= span;
        }
        let dist = o
            .iter()
            .zip(&widths)
            .map(|(&k, w)| (k as f64 * w).powi(2))
            .sum::<f64>()
            .sqrt();
        if dist < diagonal {
            excluded += 1;
            continue;
        }
        if o.iter().find(|&&k| k != 0).is_some_and(|&k| k > 0) {
            offsets.push((o, dist));
        }
    }

    let exponent = dim as f64 + sigma * p;
    let pair_sum = |pow: &(dyn Fn(f64) -> f64 + Sync)| -> f64 {
        // per-offset terms, summed in offset order whatever the split
        let parts = map_chunks(spec.workers, offsets.len(), |range| {
            offsets[range]
                .iter()
                .map(|(o, dist)| offset_sum(&values, comps, n, &strides, o, pow) / dist.powf(exponent))
                .collect::<Vec<f64>>()
        });
        parts.into_iter().flatten().sum::<f64>()
    };
    let sum = match p {
        _ if p == 2.0 => pair_sum(&|q| q),
        _ if p == 3.0 => pair_sum(&|q| q * q.sqrt()),
        _ if p == 1.5 => pair_sum(&|q: f64| {
            let r = q.sqrt();
            r * r.sqrt()
        }),
        _ => pair_sum(&|q: f64| q.powf(p / 2.0)),
    };
    let mut integral = 2.0 * cell_volume * cell_volume * sum;

    if spec.correction == DiagonalCorrection::Gradient {
        let unit_ball = sphere_area(dim) / dim as f64;
        let radius = (excluded as f64 * cell_volume / unit_ball).powf(1.0 / dim as f64);
        let radial = radius.powf((1.0 - sigma) * p) / ((1.0 - sigma) * p);
        let sphere = SphereRule::new(dim, 12, 48)?;
        let parts = map_chunks(spec.workers, total, |range| {
            let mut jac = vec![0.0; comps * dim];
            let mut x = vec![0.0; dim];
            let mut acc = Vec::with_capacity(range.len());
            for c in range {
                midpoint(c, &strides, domain, &widths, &mut x);
                sampler.gradient(&x, &mut jac);
                acc.push(sphere.integrate(|w| {
                    let q: f64 = jac
                        .chunks(dim)
                        .map(|row| {
                            let d: f64 = row.iter().zip(w).map(|(a, b)| a * b).sum();
                            d * d
                        })
                        .sum();
                    q.powf(p / 2.0)
                }));
            }
            acc
        });
        integral += cell_volume * radial * parts.into_iter().flatten().sum::<f64>();
    }
    Ok(integral.powf(1.0 / p))
}

fn midpoint(flat: usize, strides: &[usize], domain: &BoxDomain, widths: &[f64], x: &mut [f64]) {
    let mut rem = flat;
    for (a, s) in strides.iter().enumerate() {
        let i = rem / s;
        rem %= s;
        x[a] = domain.bounds()[a].0 + (i as f64 + 0.5) * widths[a];
    }
}

/// `Σ_c pow(|V(c + o) − V(c)|²)` over cells `c` with `c + o` inside the grid.
fn offset_sum(
    values: &[f64],
    comps: usize,
    n: usize,
    strides: &[usize],
    o: &[i64],
    pow: &(dyn Fn(f64) -> f64 + Sync),
) -> f64 {
    let dim = o.len();
    let ranges: Vec<(usize, usize)> = o
        .iter()
        .map(|&k| {
            if k >= 0 {
                (0, n - k as usize)
            } else {
                ((-k) as usize, n)
            }
        })
        .collect();
    let shift: i64 = o.iter().zip(strides).map(|(&k, &s)| k * s as i64).sum();
    let (inner_lo, inner_hi) = ranges[dim - 1];
    let mut outer: Vec<usize> = ranges[..dim - 1].iter().map(|r| r.0).collect();
    let mut acc = 0.0;
    loop {
        if ranges[..dim - 1].iter().any(|r| r.0 >= r.1) || inner_lo >= inner_hi {
            return 0.0;
        }
        let base: usize = outer.iter().zip(strides).map(|(i, s)| i * s).sum();
        if comps == 1 {
            for i in inner_lo..inner_hi {
                let c = base + i;
                let d = values[(c as i64 + shift) as usize] - values[c];
                acc += pow(d * d);
            }
        } else {
            for i in inner_lo..inner_hi {
                let c = base + i;
                let e = (c as i64 + shift) as usize;
                let q: f64 = values[c * comps..(c + 1) * comps]
                    .iter()
                    .zip(&values[e * comps..(e + 1) * comps])
                    .map(|(a, b)| (b - a) * (b - a))
                    .sum();
                acc += pow(q);
            }
        }
        let mut a = dim - 1;
        loop {
            if a == 0 {
                return acc;
            }
            a -= 1;
            outer[a] += 1;
            if outer[a] < ranges[a].1 {
                break;
            }
            outer[a] = ranges[a].0;
        }
    }
}

/// Integer and fractional parts of a `W^{s,p}` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevNorm {
    /// `Σ_{j ≤ [s]} ‖D^j u‖_{L^p}`.
    pub integer_part: f64,
    /// Gagliardo seminorm of `D^{[s]} u`; zero for integer `s`.
    pub fractional_part: f64,
}

impl SobolevNorm {
    pub fn total(&self) -> f64 {
        self.integer_part + self.fractional_part
    }
}

/// `‖u‖_{W^{s,p}}` over a box. `D^j u` is the vector of all ordered
/// order-`j` partials of every component, measured in the Euclidean norm.
pub fn sobolev_norm(
    u: &VectorField,
    params: &SobolevParams,
    domain: &BoxDomain,
    quadrature: &QuadratureSpec,
    pairs: &GagliardoSpec,
) -> Result<SobolevNorm> {
    let p = params.p_f64();
    let whole = params.integer_part();
    let mut integer_part = 0.0;
    let mut top = None;
    for j in 0..=whole {
        let bundle = DerivativeBundle::new(u, j)?;
        integer_part += lp_norm(&bundle, p, domain, quadrature)?;
        if j == whole {
            top = Some(bundle);
        }
    }
    let sigma = crate::scalar::rational_to_f64(params.fractional_part());
    let fractional_part = if sigma > 0.0 {
        gagliardo_seminorm(&top.expect("loop ran"), sigma, p, domain, pairs)?
    } else {
        0.0
    };
    Ok(SobolevNorm {
        integer_part,
        fractional_part,
    })
}

/// `‖f‖_{s,p} / (‖f‖^θ_{s₁,p₁} ‖f‖^{1−θ}_{s₂,p₂})`, logged across a family
/// to watch for unbounded growth.
pub fn interpolation_ratio(norm: f64, norm1: f64, norm2: f64, theta: f64) -> f64 {
    norm / (norm1.powf(theta) * norm2.powf(1.0 - theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Signal;
    use num_rational::Rational64;
    use std::f64::consts::PI;

    fn linear() -> VectorField {
        VectorField::separable(vec![SeparableField::along(1, 1, Signal::monomial(1.0, 1)).unwrap()]).unwrap()
    }

    #[test]
    fn linear_function_seminorm() {
        let unit = BoxDomain::cube(1, 0.0, 1.0).unwrap();
        let bundle = DerivativeBundle::new(&linear(), 0).unwrap();
        for n in [8, 32, 100] {
            let spec = GagliardoSpec::default().with_cells(n);
            let plain = gagliardo_seminorm(&bundle, 0.5, 2.0, &unit, &spec).unwrap();
            assert!((plain - (1.0 - 1.0 / n as f64).sqrt()).abs() < 1e-12, "n={n}: {plain}");
            let spec = spec.with_correction(DiagonalCorrection::Gradient);
            let corrected = gagliardo_seminorm(&bundle, 0.5, 2.0, &unit, &spec).unwrap();
            assert!((corrected - 1.0).abs() < 1e-12, "n={n}: {corrected}");
        }
    }

    #[test]
    fn constant_and_homogeneity() {
        let square = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        let spec = GagliardoSpec::default().with_cells(16);
        let c = VectorField::separable(vec![SeparableField::constant(2, 3.0)]).unwrap();
        let b = DerivativeBundle::new(&c, 0).unwrap();
        assert_eq!(gagliardo_seminorm(&b, 0.3, 3.0, &square, &spec).unwrap(), 0.0);
        let f = SeparableField::from_factors(1.0, vec![Signal::sin(1.0, 2.0, Rational64::new(0, 1)); 2]);
        let one = DerivativeBundle::new(&VectorField::separable(vec![f.clone()]).unwrap(), 0).unwrap();
        let three = DerivativeBundle::new(&VectorField::separable(vec![f.scaled(-3.0)]).unwrap(), 0).unwrap();
        for p in [1.5, 2.0, 2.5, 3.0] {
            let a = gagliardo_seminorm(&one, 0.5, p, &square, &spec).unwrap();
            let b = gagliardo_seminorm(&three, 0.5, p, &square, &spec).unwrap();
            assert!((b - 3.0 * a).abs() < 1e-12 * b, "p={p}");
        }
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let square = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        let f = SeparableField::from_factors(1.0, vec![Signal::sin(1.0, 3.0, Rational64::new(1, 3)); 2]);
        let b = DerivativeBundle::new(&VectorField::separable(vec![f]).unwrap(), 1).unwrap();
        let spec = GagliardoSpec::default().with_cells(12).with_correction(DiagonalCorrection::Gradient);
        let one = gagliardo_seminorm(&b, 0.5, 3.0, &square, &spec).unwrap();
        let four = gagliardo_seminorm(&b, 0.5, 3.0, &square, &spec.with_workers(Workers::new(4))).unwrap();
        assert_eq!(one.to_bits(), four.to_bits());
    }

    #[test]
    fn refinement_converges() {
        let square = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        let f = SeparableField::from_factors(1.0, vec![Signal::sin(1.0, 2.0, Rational64::new(0, 1)); 2]);
        let b = DerivativeBundle::new(&VectorField::separable(vec![f]).unwrap(), 0).unwrap();
        let est: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&n| gagliardo_seminorm(&b, 0.5, 2.0, &square, &GagliardoSpec::default().with_cells(n)).unwrap())
            .collect();
        assert!(est[0] < est[1] && est[1] < est[2]);
        assert!((est[2] - est[1]).abs() < (est[1] - est[0]).abs());
    }

    #[test]
    fn guards() {
        let unit = BoxDomain::cube(1, 0.0, 1.0).unwrap();
        let b = DerivativeBundle::new(&linear(), 0).unwrap();
        assert!(matches!(
            gagliardo_seminorm(&b, 1.0, 2.0, &unit, &GagliardoSpec::default()),
            Err(Error::Domain(_))
        ));
        let fast = VectorField::separable(vec![SeparableField::along(1, 1, Signal::sin(1.0, 1000.0, Rational64::new(0, 1))).unwrap()]).unwrap();
        let b = DerivativeBundle::new(&fast, 0).unwrap();
        assert!(matches!(
            gagliardo_seminorm(&b, 0.5, 2.0, &unit, &GagliardoSpec::default()),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn integer_norm_of_sine() {
        let u = VectorField::separable(vec![SeparableField::along(1, 1, Signal::sin(1.0, 1.0, Rational64::new(0, 1))).unwrap()]).unwrap();
        let domain = BoxDomain::cube(1, 0.0, 2.0 * PI).unwrap();
        let params = SobolevParams::new(Rational64::from_integer(1), Rational64::from_integer(2)).unwrap();
        let norm = sobolev_norm(&u, &params, &domain, &QuadratureSpec::default(), &GagliardoSpec::default()).unwrap();
        assert!((norm.integer_part - 2.0 * PI.sqrt()).abs() < 1e-12);
        assert_eq!(norm.fractional_part, 0.0);
    }

    #[test]
    fn fractional_norm_of_linear_function() {
        let params = SobolevParams::new(Rational64::new(1, 2), Rational64::from_integer(2)).unwrap();
        let unit = BoxDomain::cube(1, 0.0, 1.0).unwrap();
        let spec = GagliardoSpec::default().with_cells(64).with_correction(DiagonalCorrection::Gradient);
        let norm = sobolev_norm(&linear(), &params, &unit, &QuadratureSpec::default(), &spec).unwrap();
        assert!((norm.integer_part - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((norm.fractional_part - 1.0).abs() < 1e-12);
        let zero = VectorField::separable(vec![SeparableField::zero(1)]).unwrap();
        assert_eq!(sobolev_norm(&zero, &params, &unit, &QuadratureSpec::default(), &spec).unwrap().total(), 0.0);
    }

    #[test]
    fn triangle_inequality() {
        let square = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        let params = SobolevParams::new(Rational64::new(1, 2), Rational64::from_integer(3)).unwrap();
        let f = SeparableField::from_factors(1.0, vec![Signal::sin(1.0, 2.0, Rational64::new(0, 1)), Signal::monomial(1.0, 2)]);
        let g = SeparableField::from_factors(-0.5, vec![Signal::monomial(1.0, 1), Signal::cos(1.0, 3.0, Rational64::new(0, 1))]);
        let spec = GagliardoSpec::default().with_cells(16);
        let q = QuadratureSpec::default();
        let norm = |h: SeparableField| {
            sobolev_norm(&VectorField::separable(vec![h]).unwrap(), &params, &square, &q, &spec).unwrap().total()
        };
        assert!(norm(f.add(&g)) <= norm(f.clone()) + norm(g.clone()) + 1e-12);
    }
}
