//! Piecewise-polynomial cut-offs and radial profiles used by the families.

use std::f64::consts::PI;

use super::separable::SeparableField;
use super::signal::{Piece, Signal, Term};
use crate::error::{Error, Result};
use crate::multiindex::binomial;

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(a: &[f64], n: usize) -> Vec<f64> {
    (0..n).fold(vec![1.0], |acc, _| poly_mul(&acc, a))
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, v) in a.iter().enumerate() {
        out[i] += v;
    }
    for (i, v) in b.iter().enumerate() {
        out[i] += v;
    }
    out
}

/// Coefficients in `x` of `p((x - shift) / width)`.
fn compose_affine(p: &[f64], shift: f64, width: f64) -> Vec<f64> {
    let t = [-shift / width, 1.0 / width];
    let mut out = vec![0.0];
    for c in p.iter().rev() {
        out = poly_add(&poly_mul(&out, &t), &[*c]);
    }
    out
}

/// Piece on `[lo, hi]` equal to `p((x - shift) / width)`, stored around
/// the midpoint.
fn affine_piece(p: &[f64], shift: f64, width: f64, lo: f64, hi: f64) -> Result<Piece> {
    let center = (lo + hi) / 2.0;
    let terms = compose_affine(p, shift - center, width)
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, &c)| Term::monomial(c, j as u32))
        .collect();
    Piece::centered(lo, hi, center, terms)
}

/// Coefficients in `t` of the smoothstep
/// `S(t) = t^{k+1} Σ_{j=0}^{k} C(k+j, j) (1-t)^j`,
/// which rises from 0 to 1 on `[0, 1]` with `k` vanishing derivatives at
/// both ends.
pub fn smoothstep(k: usize) -> Vec<f64> {
    let one_minus_t = [1.0, -1.0];
    let mut sum = vec![0.0];
    for j in 0..=k {
        let c = binomial(k + j, j) as f64;
        let term: Vec<f64> = poly_pow(&one_minus_t, j).iter().map(|v| v * c).collect();
        sum = poly_add(&sum, &term);
    }
    let mut lead = vec![0.0; k + 1];
    lead.push(1.0);
    poly_mul(&lead, &sum)
}

/// One-dimensional plateau bump of class `C^smoothness`: 1 on
/// `[π/4, 3π/4]`, supported in `[π/8, 7π/8]`.
pub fn plateau(smoothness: usize) -> Signal {
    let s = smoothstep(smoothness);
    let w = PI / 8.0;
    // the falling ramp is S((7π/8 - x) / w) = S((x - 7π/8) / (-w))
    Signal::new(vec![
        affine_piece(&s, PI / 8.0, w, PI / 8.0, PI / 4.0).expect("valid piece"),
        affine_piece(&[1.0], 0.0, 1.0, PI / 4.0, 3.0 * PI / 4.0).expect("valid piece"),
        affine_piece(&s, 7.0 * PI / 8.0, -w, 3.0 * PI / 4.0, 7.0 * PI / 8.0).expect("valid piece"),
    ])
    .expect("sorted pieces")
}

/// `Π_i plateau(x_i)`.
pub fn plateau_field(dim: usize, smoothness: usize) -> SeparableField {
    SeparableField::from_factors(1.0, vec![plateau(smoothness); dim])
}

/// Default extension profile: `1 - S(t / (3/4))` on `[0, 3/4]`, zero after,
/// of class `C^{m+1}`.
pub fn extension_default(m: usize) -> Signal {
    let s = smoothstep(m + 1);
    let fall: Vec<f64> = poly_add(&[1.0], &s.iter().map(|c| -c).collect::<Vec<_>>());
    Signal::new(vec![affine_piece(&fall, 0.0, 0.75, 0.0, 0.75).expect("valid piece")])
        .expect("single piece")
}

/// Second extension profile `(1 - t/a)^{m+2}` on `[0, a]`, zero after.
pub fn extension_power(m: usize, a: f64) -> Result<Signal> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("profile end {a} must lie in (0, 1)")));
    }
    let fall = poly_pow(&[1.0, -1.0], m + 2);
    Signal::new(vec![affine_piece(&fall, 0.0, a, 0.0, a)?])
}

/// Checks that `chi(0) = 1` and that `chi` vanishes on a neighbourhood of 1.
pub fn check_extension_profile(chi: &Signal) -> Result<()> {
    let (_, hi) = chi
        .support()
        .ok_or_else(|| Error::domain("extension profile is identically zero"))?;
    if hi >= 1.0 {
        return Err(Error::domain(format!(
            "extension profile is not compactly supported in [0, 1): support reaches {hi}"
        )));
    }
    let at_zero = chi.eval(0.0);
    if (at_zero - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "extension profile must equal 1 at 0, found {at_zero}"
        )));
    }
    Ok(())
}

/// Bump `((ρ-a)(b-ρ))^3 / ((b-a)/2)^6` on `[a, b]`, peak value 1.
fn cubic_bump(a: f64, b: f64, sign: f64) -> Result<Piece> {
    // in s = (ρ-a)/(b-a): 64 (s(1-s))^3
    let coeffs: Vec<f64> = poly_pow(&[0.0, 1.0, -1.0], 3)
        .iter()
        .map(|c| sign * 64.0 * c)
        .collect();
    affine_piece(&coeffs, a, b - a, a, b)
}

/// Default radial profile: a positive bump on `[0.2, 0.5]` followed by an
/// equal negative one on `[0.5, 0.8]`, so its integral vanishes.
pub fn radial_default() -> Signal {
    Signal::new(vec![
        cubic_bump(0.2, 0.5, 1.0).expect("valid piece"),
        cubic_bump(0.5, 0.8, -1.0).expect("valid piece"),
    ])
    .expect("sorted pieces")
}
