//! Piecewise poly-trig functions of one variable.
//!
//! A signal is a list of pieces on disjoint intervals; each piece is a sum
//! of terms `c · (x - x₀)^a · w(ωx + φπ)` where `x₀` is the piece's
//! expansion center, `w` is `sin` or the constant 1 and `φ` is rational.
//! Cosines are stored as sines shifted by `π/2`. Outside its pieces a
//! signal is zero.
//!
//! Local centers keep short polynomial pieces far from the origin from
//! turning into huge cancelling monomial coefficients.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::calculus::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wave {
    One,
    Sin,
}

/// `coeff · (x - x₀)^power · wave(omega·x + phase·π)` for the center `x₀`
/// of the enclosing piece.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub power: u32,
    pub wave: Wave,
    pub omega: f64,
    pub phase: Rational64,
}

impl Term {
    pub fn monomial(coeff: f64, power: u32) -> Self {
        Term {
            coeff,
            power,
            wave: Wave::One,
            omega: 0.0,
            phase: Rational64::zero(),
        }
    }

    pub fn sin(coeff: f64, power: u32, omega: f64, phase: Rational64) -> Self {
        Term {
            coeff,
            power,
            wave: Wave::Sin,
            omega,
            phase,
        }
    }

    pub fn cos(coeff: f64, power: u32, omega: f64, phase: Rational64) -> Self {
        Term::sin(coeff, power, omega, phase + Rational64::new(1, 2))
    }

    /// Rewrites the term so that `omega > 0` and `phase ∈ [0, 1)`, or as a
    /// plain monomial when the frequency vanishes.
    fn canonical(mut self) -> Term {
        if self.wave == Wave::One {
            self.omega = 0.0;
            self.phase = Rational64::zero();
            return self;
        }
        if self.omega < 0.0 {
            self.omega = -self.omega;
            self.phase = -self.phase;
            self.coeff = -self.coeff;
        }
        let two = Rational64::from_integer(2);
        let mut phase = self.phase % two;
        if phase < Rational64::zero() {
            phase += two;
        }
        if phase >= Rational64::one() {
            phase -= Rational64::one();
            self.coeff = -self.coeff;
        }
        self.phase = phase;
        if self.omega == 0.0 {
            let factor = sin_pi(phase);
            return Term::monomial(self.coeff * factor, self.power);
        }
        self
    }

    fn same_shape(&self, other: &Term) -> bool {
        self.power == other.power
            && self.wave == other.wave
            && self.omega == other.omega
            && self.phase == other.phase
    }

    fn shape_key(&self) -> (u32, bool, u64, i64, i64) {
        (
            self.power,
            self.wave == Wave::Sin,
            self.omega.to_bits(),
            *self.phase.numer(),
            *self.phase.denom(),
        )
    }

    /// Value at `x` for center 0.
    pub fn eval(&self, x: f64) -> f64 {
        self.value(x, 0.0)
    }

    fn value(&self, x: f64, center: f64) -> f64 {
        let poly = self.coeff * (x - center).powi(self.power as i32);
        match self.wave {
            Wave::One => poly,
            Wave::Sin => poly * (self.omega * x + rational_to_f64(self.phase) * PI).sin(),
        }
    }

    /// `(x - from)^a` rewritten around `to` by the binomial theorem.
    fn recenter(&self, from: f64, to: f64) -> Vec<Term> {
        if from == to || self.power == 0 {
            return vec![self.clone()];
        }
        let d = to - from;
        let a = self.power;
        let mut binom = 1.0;
        let mut out = Vec::with_capacity(a as usize + 1);
        for k in 0..=a {
            out.push(Term {
                coeff: self.coeff * binom * d.powi((a - k) as i32),
                power: k,
                ..self.clone()
            });
            binom = binom * (a - k) as f64 / (k + 1) as f64;
        }
        out
    }

    fn derivative(&self) -> Vec<Term> {
        let mut out = Vec::with_capacity(2);
        if self.power > 0 {
            let mut t = self.clone();
            t.coeff *= self.power as f64;
            t.power -= 1;
            out.push(t);
        }
        if self.wave == Wave::Sin {
            let mut t = self.clone();
            t.coeff *= self.omega;
            t.phase += Rational64::new(1, 2);
            out.push(t);
        }
        out
    }

    fn product(&self, other: &Term) -> Vec<Term> {
        let coeff = self.coeff * other.coeff;
        let power = self.power + other.power;
        match (self.wave, other.wave) {
            (Wave::One, Wave::One) => vec![Term::monomial(coeff, power)],
            (Wave::One, Wave::Sin) => vec![Term::sin(coeff, power, other.omega, other.phase)],
            (Wave::Sin, Wave::One) => vec![Term::sin(coeff, power, self.omega, self.phase)],
            (Wave::Sin, Wave::Sin) => {
                // sin a sin b = (cos(a-b) - cos(a+b)) / 2
                vec![
                    Term::cos(
                        coeff / 2.0,
                        power,
                        self.omega - other.omega,
                        self.phase - other.phase,
                    ),
                    Term::cos(
                        -coeff / 2.0,
                        power,
                        self.omega + other.omega,
                        self.phase + other.phase,
                    ),
                ]
            }
        }
    }

    /// Exact definite integral over `[lo, hi]` for center 0.
    pub fn integrate(&self, lo: f64, hi: f64) -> f64 {
        self.integrate_around(0.0, lo, hi)
    }

    fn integrate_around(&self, center: f64, lo: f64, hi: f64) -> f64 {
        let a = self.power;
        let (lo, hi) = (lo - center, hi - center);
        match self.wave {
            Wave::One => {
                let n = (a + 1) as i32;
                self.coeff * (hi.powi(n) - lo.powi(n)) / n as f64
            }
            Wave::Sin => {
                // in y = x - x₀ the phase picks up ω·x₀
                let phase = rational_to_f64(self.phase) * PI + self.omega * center;
                let reach = self.omega * lo.abs().max(hi.abs());
                let value = if reach <= 2.0 * a as f64 + 2.0 {
                    panel_integral(a, self.omega, phase, lo, hi)
                } else {
                    let f = |y: f64| antiderivative(a, self.omega, phase, y);
                    f(hi) - f(lo)
                };
                self.coeff * value
            }
        }
    }
}

/// `sin(qπ)`, exact at multiples of `π/2`.
fn sin_pi(q: Rational64) -> f64 {
    let two = Rational64::from_integer(2);
    let mut r = q % two;
    if r < Rational64::zero() {
        r += two;
    }
    if r.is_zero() || r.is_one() {
        0.0
    } else if r == Rational64::new(1, 2) {
        1.0
    } else if r == Rational64::new(3, 2) {
        -1.0
    } else {
        (rational_to_f64(r) * PI).sin()
    }
}

/// `Im ∫ x^a e^{i(ωx+φ)}` via repeated integration by parts.
fn antiderivative(a: u32, omega: f64, phase: f64, x: f64) -> f64 {
    let i_omega = Complex64::new(0.0, omega);
    let mut sum = Complex64::zero();
    let mut falling = 1.0;
    let mut denom = i_omega;
    for j in 0..=a {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * falling * x.powi((a - j) as i32) / denom;
        falling *= (a - j) as f64;
        denom *= i_omega;
    }
    (Complex64::new(0.0, omega * x + phase).exp() * sum).im
}

/// Gauss panels short enough that `ω · width ≤ 2`, with enough points per
/// panel to integrate `x^a` and the Taylor tail of the sine to rounding.
///
/// Used where the closed form suffers cancellation: the antiderivative
/// carries terms of size `a! / ω^{a+1}` that dwarf the integral unless
/// `ω |x|` is large compared with `a`.
fn panel_integral(a: u32, omega: f64, phi: f64, lo: f64, hi: f64) -> f64 {
    let rules = gauss_cache();
    let points = (a as usize / 2 + 12).min(rules.len());
    let (nodes, weights) = &rules[points - 1];
    let panels = ((omega * (hi - lo) / 2.0).ceil() as usize).max(1);
    let width = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let left = lo + k as f64 * width;
        let mid = left + width / 2.0;
        let mut acc = 0.0;
        for (t, w) in nodes.iter().zip(weights) {
            let x = mid + t * width / 2.0;
            acc += w * x.powi(a as i32) * (omega * x + phi).sin();
        }
        total += acc * width / 2.0;
    }
    total
}

fn gauss_cache() -> &'static [(Vec<f64>, Vec<f64>)] {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    RULES.get_or_init(|| (1..=48).map(gauss_legendre).collect())
}

fn merge_terms(terms: impl IntoIterator<Item = Term>) -> Vec<Term> {
    let mut all: Vec<Term> = terms
        .into_iter()
        .map(Term::canonical)
        .filter(|t| t.coeff != 0.0)
        .collect();
    all.sort_by_key(|t| t.shape_key());
    let mut out: Vec<Term> = Vec::with_capacity(all.len());
    for t in all {
        match out.last_mut() {
            Some(last) if last.same_shape(&t) => last.coeff += t.coeff,
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coeff != 0.0);
    out
}

/// Terms valid on `[lo, hi]`, powers taken around `center`; either end
/// may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub terms: Vec<Term>,
}

impl Piece {
    /// Terms in powers of `x`.
    pub fn new(lo: f64, hi: f64, terms: Vec<Term>) -> Result<Self> {
        Piece::centered(lo, hi, 0.0, terms)
    }

    /// Terms in powers of `x - center`.
    pub fn centered(lo: f64, hi: f64, center: f64, terms: Vec<Term>) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::domain(format!("invalid piece interval [{lo}, {hi}]")));
        }
        if !center.is_finite() {
            return Err(Error::domain(format!("piece center {center} is not finite")));
        }
        Ok(Piece {
            lo,
            hi,
            center,
            terms: merge_terms(terms),
        })
    }

    fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.value(x, self.center)).sum()
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn terms_around(&self, center: f64) -> Vec<Term> {
        self.terms
            .iter()
            .flat_map(|t| t.recenter(self.center, center))
            .collect()
    }

    fn integrate(&self, lo: f64, hi: f64) -> Result<f64> {
        let a = lo.max(self.lo);
        let b = hi.min(self.hi);
        if a >= b || self.terms.is_empty() {
            return Ok(0.0);
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::domain("integral over an unbounded piece"));
        }
        Ok(self.terms.iter().map(|t| t.integrate_around(self.center, a, b)).sum())
    }
}

/// Piecewise poly-trig function of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pieces: Vec<Piece>,
}

impl Signal {
    /// Pieces must be sorted with disjoint interiors.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        for w in pieces.windows(2) {
            if w[0].hi > w[1].lo {
                return Err(Error::domain(format!(
                    "pieces [{}, {}] and [{}, {}] overlap or are unsorted",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        let pieces = pieces.into_iter().filter(|p| !p.terms.is_empty()).collect();
        Ok(Signal { pieces })
    }

    pub fn zero() -> Self {
        Signal { pieces: Vec::new() }
    }

    /// A single piece covering the whole line.
    pub fn global(terms: Vec<Term>) -> Self {
        Signal::new(vec![Piece::new(f64::NEG_INFINITY, f64::INFINITY, terms).expect("valid")])
            .expect("single piece")
    }

    pub fn constant(c: f64) -> Self {
        Signal::global(vec![Term::monomial(c, 0)])
    }

    pub fn monomial(c: f64, power: u32) -> Self {
        Signal::global(vec![Term::monomial(c, power)])
    }

    /// `c · sin(ωx + φπ)`.
    pub fn sin(c: f64, omega: f64, phase: Rational64) -> Self {
        Signal::global(vec![Term::sin(c, 0, omega, phase)])
    }

    /// `c · cos(ωx + φπ)`.
    pub fn cos(c: f64, omega: f64, phase: Rational64) -> Self {
        Signal::global(vec![Term::cos(c, 0, omega, phase)])
    }

    /// Polynomial `Σ coeffs[j] x^j` on `[lo, hi]`.
    pub fn polynomial_on(coeffs: &[f64], lo: f64, hi: f64) -> Result<Self> {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| Term::monomial(c, j as u32))
            .collect();
        Signal::new(vec![Piece::new(lo, hi, terms)?])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        for p in &self.pieces {
            if x >= p.lo && x <= p.hi {
                return p.eval(x);
            }
        }
        0.0
    }

    pub fn derivative(&self) -> Signal {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                terms: merge_terms(p.terms.iter().flat_map(Term::derivative)),
                ..p.clone()
            })
            .filter(|p| !p.terms.is_empty())
            .collect();
        Signal { pieces }
    }

    pub fn nth_derivative(&self, order: usize) -> Signal {
        let mut out = self.clone();
        for _ in 0..order {
            out = out.derivative();
        }
        out
    }

    pub fn scale(&self, c: f64) -> Signal {
        if c == 0.0 {
            return Signal::zero();
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                terms: p
                    .terms
                    .iter()
                    .map(|t| Term {
                        coeff: t.coeff * c,
                        ..t.clone()
                    })
                    .collect(),
                ..p.clone()
            })
            .collect();
        Signal { pieces }
    }

    pub fn product(&self, other: &Signal) -> Signal {
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let lo = a.lo.max(b.lo);
                let hi = a.hi.min(b.hi);
                if lo >= hi {
                    continue;
                }
                let center = if a.width() <= b.width() { a.center } else { b.center };
                let left = a.terms_around(center);
                let right = b.terms_around(center);
                let terms = merge_terms(
                    left.iter()
                        .flat_map(|s| right.iter().flat_map(move |t| s.product(t))),
                );
                if !terms.is_empty() {
                    pieces.push(Piece { lo, hi, center, terms });
                }
            }
        }
        pieces.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        Signal { pieces }
    }

    /// Pointwise sum; the result is split at the union of breakpoints.
    pub fn add(&self, other: &Signal) -> Signal {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .flat_map(|p| [p.lo, p.hi])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let covering: Vec<&Piece> = self
                .pieces
                .iter()
                .chain(&other.pieces)
                .filter(|p| p.lo <= lo && p.hi >= hi)
                .collect();
            let Some(narrowest) = covering.iter().min_by(|p, q| p.width().total_cmp(&q.width())) else {
                continue;
            };
            let center = narrowest.center;
            let terms = merge_terms(covering.iter().flat_map(|p| p.terms_around(center)));
            if !terms.is_empty() {
                pieces.push(Piece { lo, hi, center, terms });
            }
        }
        Signal { pieces }
    }

    /// Exact integral over `[lo, hi]`.
    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64> {
        if lo > hi {
            return Ok(-self.integrate(hi, lo)?);
        }
        let mut total = 0.0;
        for p in &self.pieces {
            total += p.integrate(lo, hi)?;
        }
        Ok(total)
    }

    /// `x ↦ f(x / eps)`.
    pub fn rescale(&self, eps: f64) -> Result<Signal> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::domain(format!("rescale factor {eps} must be positive")));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lo: p.lo * eps,
                hi: p.hi * eps,
                center: p.center * eps,
                terms: p
                    .terms
                    .iter()
                    .map(|t| Term {
                        coeff: t.coeff / eps.powi(t.power as i32),
                        omega: t.omega / eps,
                        ..t.clone()
                    })
                    .collect(),
            })
            .collect();
        Ok(Signal { pieces })
    }

    pub fn max_frequency(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.terms.iter().map(|t| t.omega))
            .fold(0.0, f64::max)
    }

    pub fn max_power(&self) -> u32 {
        self.pieces
            .iter()
            .flat_map(|p| p.terms.iter().map(|t| t.power))
            .max()
            .unwrap_or(0)
    }

    /// Finite piece ends, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.lo, p.hi])
            .filter(|x| x.is_finite())
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Smallest closed interval outside which the signal vanishes.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.lo, self.pieces.last()?.hi))
    }

    /// Sum of absolute term values at `x`; a natural scale for rounding.
    pub fn magnitude(&self, x: f64) -> f64 {
        for p in &self.pieces {
            if x >= p.lo && x <= p.hi {
                return p.terms.iter().map(|t| t.value(x, p.center).abs()).sum();
            }
        }
        0.0
    }

    pub fn term_count(&self) -> usize {
        self.pieces.iter().map(|p| p.terms.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn sin_squared_on_plateau() {
        for k in [1.0, 3.0, 8.0, 17.0, 256.0] {
            let s = Signal::sin(1.0, k, r(0, 1));
            let sq = s.product(&s);
            let (a, b) = (PI / 4.0, 3.0 * PI / 4.0);
            let got = sq.integrate(a, b).unwrap();
            let oracle = |x: f64| x / 2.0 - (2.0 * k * x).sin() / (4.0 * k);
            assert!((got - (oracle(b) - oracle(a))).abs() < 1e-12, "k={k}");
            let closed = PI / 4.0 - ((1.5 * k * PI).sin() - (0.5 * k * PI).sin()) / (4.0 * k);
            assert!((got - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn x_sin_two_pi_x() {
        let f = Signal::global(vec![Term::sin(1.0, 1, 2.0 * PI, r(0, 1))]);
        let got = f.integrate(0.0, 1.0).unwrap();
        assert!((got + 1.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn canonical_forms() {
        let c = Signal::cos(2.0, 3.0, r(0, 1));
        let t = &c.pieces()[0].terms[0];
        assert_eq!(t.phase, r(1, 2));
        let neg = Signal::sin(1.0, -3.0, r(1, 3));
        let t = &neg.pieces()[0].terms[0];
        assert!(t.omega > 0.0 && t.phase >= r(0, 1) && t.phase < r(1, 1));
        for x in [0.1, 0.7, 2.3] {
            assert!((neg.eval(x) - (-3.0 * x + PI / 3.0).sin()).abs() < 1e-14);
        }
        // sin(π + x) = -sin x
        let shifted = Signal::sin(1.0, 1.0, r(1, 1));
        assert!((shifted.eval(0.4) + 0.4f64.sin()).abs() < 1e-15);
        assert_eq!(Signal::sin(1.0, 0.0, r(1, 2)), Signal::constant(1.0));
    }

    #[test]
    fn derivative_of_polytrig() {
        let f = Signal::global(vec![Term::sin(1.5, 2, 3.0, r(1, 4))]);
        let d = f.derivative();
        for x in [-1.0, 0.3, 2.0] {
            let exact = 1.5
                * (2.0 * x * (3.0 * x + PI / 4.0).sin()
                    + 3.0 * x * x * (3.0 * x + PI / 4.0).cos());
            assert!((d.eval(x) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn product_and_add_match_pointwise() {
        let a = Signal::new(vec![
            Piece::new(0.0, 1.0, vec![Term::monomial(2.0, 1)]).unwrap(),
            Piece::new(1.0, 3.0, vec![Term::sin(1.0, 0, 2.0, r(1, 3))]).unwrap(),
        ])
        .unwrap();
        let b = Signal::new(vec![Piece::new(0.5, 2.0, vec![Term::cos(-1.0, 1, 5.0, r(0, 1))]).unwrap()])
            .unwrap();
        let p = a.product(&b);
        let s = a.add(&b);
        for i in 0..60 {
            let x = -0.2 + i as f64 * 0.06;
            assert!((p.eval(x) - a.eval(x) * b.eval(x)).abs() < 1e-12, "x={x}");
            // sum at an interior point of every piece
            if ![0.0, 0.5, 1.0, 2.0, 3.0].iter().any(|c| (x - c).abs() < 1e-9) {
                assert!((s.eval(x) - a.eval(x) - b.eval(x)).abs() < 1e-12, "x={x}");
            }
        }
    }

    #[test]
    fn low_frequency_integral_is_stable() {
        let f = Signal::global(vec![Term::sin(1.0, 3, 1e-7, r(0, 1))]);
        // ≈ ∫ x^3 · 1e-7 x
        let got = f.integrate(0.0, 2.0).unwrap();
        assert!((got - 1e-7 * 32.0 / 5.0).abs() < 1e-20);
    }

    #[test]
    fn rescale_is_composition() {
        let f = Signal::new(vec![Piece::new(-1.0, 1.0, vec![Term::sin(2.0, 2, 3.0, r(1, 5))]).unwrap()])
            .unwrap();
        let g = f.rescale(0.25).unwrap();
        for x in [-0.2, 0.05, 0.24, 0.3] {
            assert!((g.eval(x) - f.eval(x / 0.25)).abs() < 1e-12);
        }
    }

    #[test]
    fn unbounded_integral_rejected() {
        assert!(Signal::constant(1.0).integrate(0.0, f64::INFINITY).is_err());
        assert_eq!(Signal::constant(1.0).integrate(0.0, 2.0).unwrap(), 2.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn term() -> impl Strategy<Value = Term> {
            (-3.0f64..3.0, 0u32..4, prop::bool::ANY, 0.0f64..9.0, -4i64..8).prop_map(
                |(c, a, trig, w, ph)| {
                    if trig {
                        Term::sin(c, a, w, Rational64::new(ph, 4))
                    } else {
                        Term::monomial(c, a)
                    }
                },
            )
        }

        proptest! {
            #[test]
            fn integral_matches_simpson(terms in proptest::collection::vec(term(), 1..4),
                                        lo in -2.0f64..1.0, len in 0.1f64..2.0) {
                let f = Signal::global(terms);
                let hi = lo + len;
                let n = 4000;
                let h = len / n as f64;
                let mut simpson = f.eval(lo) + f.eval(hi);
                for i in 1..n {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    simpson += w * f.eval(lo + i as f64 * h);
                }
                simpson *= h / 3.0;
                let exact = f.integrate(lo, hi).unwrap();
                prop_assert!((exact - simpson).abs() < 1e-8 * (1.0 + simpson.abs()));
            }

            #[test]
            fn derivative_matches_difference(terms in proptest::collection::vec(term(), 1..4),
                                             x in -2.0f64..2.0) {
                let f = Signal::global(terms);
                let h = 1e-5;
                let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
                let d = f.derivative().eval(x);
                prop_assert!((d - fd).abs() < 1e-5 * (1.0 + d.abs()));
            }
        }
    }
}
