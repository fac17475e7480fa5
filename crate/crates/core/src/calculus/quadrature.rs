//! Gauss–Legendre rules: composite 1-D, tensor boxes, spheres and balls.

use std::f64::consts::PI;

use super::BoxDomain;
use crate::error::{Error, Result};
use crate::fields::SeparableField;
use crate::parallel::{map_chunks, Workers};

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    /// Composite rule on `[lo, hi]` with panels of `order` points. The
    /// interval is first cut at `breaks`; `panels` are then shared out in
    /// proportion to length, at least one per cut.
    pub fn composite(lo: f64, hi: f64, breaks: &[f64], panels: usize, order: usize) -> Rule1D {
        let mut cuts = vec![lo];
        cuts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let total = hi - lo;
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in cuts.windows(2) {
            let len = w[1] - w[0];
            let count = ((panels as f64 * len / total).ceil() as usize).max(1);
            let h = len / count as f64;
            for p in 0..count {
                let a = w[0] + p as f64 * h;
                for (x, wt) in gx.iter().zip(&gw) {
                    nodes.push(a + (x + 1.0) * h / 2.0);
                    weights.push(wt * h / 2.0);
                }
            }
        }
        Rule1D { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Resolution settings for tensor quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes per axis available to the rule (rounded up to whole panels).
    pub nodes_per_axis: usize,
    /// Points per Gauss panel.
    pub order: usize,
    /// Guard: minimum nodes per wavelength of the fastest oscillation.
    pub min_nodes_per_wavelength: f64,
    pub workers: Workers,
}

/// Hard cap on nodes per axis.
pub const MAX_NODES_PER_AXIS: usize = 1024;

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_per_axis: 64,
            order: 8,
            min_nodes_per_wavelength: 12.0,
            workers: Workers::single(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes_per_axis = nodes;
        self
    }

    pub fn with_workers(mut self, workers: Workers) -> Self {
        self.workers = workers;
        self
    }

    /// Nodes the guard demands for frequency `omega` over `length`.
    pub fn required_nodes(&self, omega: f64, length: f64) -> usize {
        let waves = omega * length / (2.0 * PI);
        (self.min_nodes_per_wavelength * waves).ceil() as usize
    }

    /// Smallest admissible node count for the frequency, if under the cap.
    pub fn auto_for(omega: f64, length: f64) -> Result<Self> {
        let base = QuadratureSpec::default();
        let needed = base.required_nodes(omega, length).max(base.nodes_per_axis);
        let nodes = needed.div_ceil(base.order) * base.order;
        if nodes > MAX_NODES_PER_AXIS {
            return Err(Error::Resolution {
                axis: 1,
                required: needed,
                available: MAX_NODES_PER_AXIS,
            });
        }
        Ok(base.with_nodes(nodes))
    }

    fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 2 || self.order < 1 {
            return Err(Error::config("quadrature needs at least 2 nodes per axis"));
        }
        if self.nodes_per_axis > MAX_NODES_PER_AXIS {
            return Err(Error::config(format!(
                "{} nodes per axis exceeds the cap of {MAX_NODES_PER_AXIS}",
                self.nodes_per_axis
            )));
        }
        Ok(())
    }

    fn panels(&self) -> usize {
        self.nodes_per_axis.div_ceil(self.order)
    }
}

/// A scalar function on `R^N` that can report its own resolution needs.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
    /// Largest angular frequency along a 1-based axis.
    fn max_frequency(&self, axis: usize) -> f64;
    /// Points along a 1-based axis where the field is only finitely smooth.
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let _ = axis;
        Vec::new()
    }
}

impl ScalarField for SeparableField {
    fn dim(&self) -> usize {
        SeparableField::dim(self)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        SeparableField::eval(self, x)
    }
    fn max_frequency(&self, axis: usize) -> f64 {
        SeparableField::max_frequency(self, axis)
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        SeparableField::breakpoints(self, axis)
    }
}

/// Builds the per-axis rules after checking the resolution guard.
pub fn box_rules(field: &dyn ScalarField, domain: &BoxDomain, spec: &QuadratureSpec) -> Result<Vec<Rule1D>> {
    spec.validate()?;
    if field.dim() != domain.dim() {
        return Err(Error::domain(format!(
            "field of dimension {} on a box of dimension {}",
            field.dim(),
            domain.dim()
        )));
    }
    let mut rules = Vec::with_capacity(domain.dim());
    for (axis, &(lo, hi)) in domain.bounds().iter().enumerate() {
        let required = spec.required_nodes(field.max_frequency(axis + 1), hi - lo);
        if required > spec.nodes_per_axis {
            return Err(Error::Resolution {
                axis: axis + 1,
                required,
                available: spec.nodes_per_axis,
            });
        }
        rules.push(Rule1D::composite(
            lo,
            hi,
            &field.breakpoints(axis + 1),
            spec.panels(),
            spec.order,
        ));
    }
    Ok(rules)
}

/// Tensor-product Gauss–Legendre integral over a box.
pub fn integrate_quadrature(field: &dyn ScalarField, domain: &BoxDomain, spec: &QuadratureSpec) -> Result<f64> {
    let rules = box_rules(field, domain, spec)?;
    Ok(tensor_sum(&rules, spec.workers, |x| field.eval(x)))
}

/// `Σ w(x) f(x)` over the tensor grid, split on the first axis and reduced
/// in chunk order.
pub fn tensor_sum(rules: &[Rule1D], workers: Workers, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
    let dim = rules.len();
    if dim == 0 {
        return f(&[]);
    }
    let parts = map_chunks(workers, rules[0].nodes.len(), |range| {
        let mut acc = 0.0;
        let mut x = vec![0.0; dim];
        let mut idx = vec![0usize; dim];
        for i0 in range {
            x[0] = rules[0].nodes[i0];
            let w0 = rules[0].weights[i0];
            idx[1..].iter_mut().for_each(|v| *v = 0);
            loop {
                let mut w = w0;
                for d in 1..dim {
                    x[d] = rules[d].nodes[idx[d]];
                    w *= rules[d].weights[idx[d]];
                }
                acc += w * f(&x);
                let mut d = dim;
                loop {
                    d -= 1;
                    if d == 0 {
                        break;
                    }
                    idx[d] += 1;
                    if idx[d] < rules[d].nodes.len() {
                        break;
                    }
                    idx[d] = 0;
                }
                if d == 0 {
                    break;
                }
            }
        }
        acc
    });
    parts.into_iter().sum()
}

/// Directions and weights on the unit sphere `S^{N-1}`; weights sum to
/// its area.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub directions: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Hyperspherical product rule: `polar` Gauss points for each polar
    /// angle, `azimuth` equispaced points for the last angle.
    pub fn new(dim: usize, polar: usize, azimuth: usize) -> Result<SphereRule> {
        match dim {
            0 => Err(Error::domain("sphere of dimension 0")),
            1 => Ok(SphereRule {
                directions: vec![vec![-1.0], vec![1.0]],
                weights: vec![1.0, 1.0],
            }),
            _ => {
                let mut directions = Vec::new();
                let mut weights = Vec::new();
                let (gx, gw) = gauss_legendre(polar);
                let polar_count = dim - 2;
                let mut idx = vec![0usize; polar_count];
                loop {
                    let mut prefix = 1.0;
                    let mut w = 1.0;
                    let mut head = Vec::with_capacity(dim);
                    for (k, &i) in idx.iter().enumerate() {
                        let theta = (gx[i] + 1.0) * PI / 2.0;
                        head.push(prefix * theta.cos());
                        w *= gw[i] * PI / 2.0 * theta.sin().powi((dim - 2 - k) as i32);
                        prefix *= theta.sin();
                    }
                    for j in 0..azimuth {
                        let phi = 2.0 * PI * (j as f64 + 0.5) / azimuth as f64;
                        let mut dir = head.clone();
                        dir.push(prefix * phi.cos());
                        dir.push(prefix * phi.sin());
                        directions.push(dir);
                        weights.push(w * 2.0 * PI / azimuth as f64);
                    }
                    let mut k = polar_count;
                    loop {
                        if k == 0 {
                            return Ok(SphereRule { directions, weights });
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < polar {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
        }
    }

    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w * f(d))
            .sum()
    }
}

/// `∫_{|x|<radius} f` in polar coordinates: a composite radial rule cut at
/// `radial_breaks` times a sphere rule.
pub fn integrate_ball(
    f: impl Fn(&[f64]) -> f64 + Sync,
    dim: usize,
    radius: f64,
    radial_breaks: &[f64],
    radial_panels: usize,
    sphere: &SphereRule,
    workers: Workers,
) -> f64 {
    let radial = Rule1D::composite(0.0, radius, radial_breaks, radial_panels, 8);
    let parts = map_chunks(workers, radial.nodes.len(), |range| {
        let mut acc = 0.0;
        let mut x = vec![0.0; dim];
        for i in range {
            let rho = radial.nodes[i];
            let shell = sphere.integrate(|dir| {
                for (xi, di) in x.iter_mut().zip(dir) {
                    *xi = rho * di;
                }
                f(&x)
            });
            acc += radial.weights[i] * rho.powi(dim as i32 - 1) * shell;
        }
        acc
    });
    parts.into_iter().sum()
}

/// `∫_0^π sin^i θ dθ` by the Wallis recurrence.
pub fn wallis(i: usize) -> f64 {
    match i {
        0 => PI,
        1 => 2.0,
        _ => (i - 1) as f64 / i as f64 * wallis(i - 2),
    }
}

/// Area of `S^{N-1}` as `2π Π_{i=1}^{N-2} I(i)`.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        _ => 2.0 * PI * (1..=dim - 2).map(wallis).product::<f64>(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Signal;
    use num_rational::Rational64;

    #[test]
    fn gauss_rule_is_exact_for_polynomials() {
        for n in 1..=20 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn composite_respects_breaks() {
        let r = Rule1D::composite(0.0, 3.0, &[1.0, 2.5], 6, 4);
        assert!((r.weights.iter().sum::<f64>() - 3.0).abs() < 1e-14);
        // |x - 1| is exact when the kink is a panel edge
        let got = r.integrate(|x| (x - 1.0).abs());
        assert!((got - 2.5).abs() < 1e-13);
    }

    #[test]
    fn box_volume_and_polynomial() {
        let domain = BoxDomain::new(vec![(0.0, 2.0), (-1.0, 0.5)]).unwrap();
        let one = SeparableField::constant(2, 1.0);
        let v = integrate_quadrature(&one, &domain, &QuadratureSpec::default()).unwrap();
        assert!((v - 3.0).abs() < 1e-13);
        let f = SeparableField::from_factors(
            1.0,
            vec![Signal::monomial(1.0, 7), Signal::monomial(1.0, 3)],
        );
        let spec = QuadratureSpec::default().with_nodes(4);
        let spec = QuadratureSpec { order: 4, ..spec };
        let got = integrate_quadrature(&f, &domain, &spec).unwrap();
        let exact = (256.0 / 8.0) * ((0.0625 - 1.0) / 4.0);
        assert!((got - exact).abs() < 1e-12);
    }

    #[test]
    fn guard_reports_required_nodes() {
        let domain = BoxDomain::new(vec![(0.0, PI)]).unwrap();
        let f = SeparableField::from_factors(1.0, vec![Signal::sin(1.0, 64.0, Rational64::from_integer(0))]);
        let err = integrate_quadrature(&f, &domain, &QuadratureSpec::default()).unwrap_err();
        match err {
            Error::Resolution { axis, required, available } => {
                assert_eq!((axis, required, available), (1, 384, 64));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sphere_areas() {
        for dim in 1..=5 {
            let rule = SphereRule::new(dim, 12, 24).unwrap();
            let area: f64 = rule.weights.iter().sum();
            assert!((area - sphere_area(dim)).abs() < 1e-10, "dim={dim}");
        }
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        // ∫_S x_1^2 = area / N
        let rule = SphereRule::new(3, 10, 20).unwrap();
        let got = rule.integrate(|d| d[0] * d[0]);
        assert!((got - 4.0 * PI / 3.0).abs() < 1e-9, "{got}");
    }

    #[test]
    fn ball_volume() {
        let rule = SphereRule::new(3, 8, 16).unwrap();
        let v = integrate_ball(|_| 1.0, 3, 2.0, &[], 4, &rule, Workers::single());
        assert!((v - 4.0 / 3.0 * PI * 8.0).abs() < 1e-10);
    }
}
