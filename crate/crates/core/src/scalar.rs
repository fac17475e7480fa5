//! Scalar kinds used by the determinant kernels.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Field element accepted by [`HyperMatrix`](crate::HyperMatrix).
///
/// Implemented for `f64` and for exact `BigRational`.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn abs_value(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn from_i64(value: i64) -> Self;
    /// Exact for rationals (every finite double is a dyadic rational).
    fn from_f64(value: f64) -> Self;
}

impl Scalar for f64 {
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_i64(value: i64) -> Self {
        value as f64
    }
    fn from_f64(value: f64) -> Self {
        value
    }
}

impl Scalar for BigRational {
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }
    fn from_f64(value: f64) -> Self {
        BigRational::from_float(value).expect("finite double")
    }
}

/// Parses `"p/q"`, an integer, or a plain decimal (`"0.75"`) into an exact
/// small rational.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(num, den));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac_part.len() > 15 {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let den = 10i64.pow(frac_part.len() as u32);
    let value = Rational64::new(num, den);
    Ok(if negative { -value } else { value })
}

/// Parses `"p/q"` or an integer string into a big rational.
pub fn parse_big_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Ok(int) = text.parse::<BigInt>() {
        return Ok(BigRational::from_integer(int));
    }
    let small = parse_rational(text)?;
    Ok(BigRational::new(
        BigInt::from(*small.numer()),
        BigInt::from(*small.denom()),
    ))
}

pub fn format_big_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn rational_to_f64(value: Rational64) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), Rational64::new(3, 4));
        assert_eq!(parse_rational("0.75").unwrap(), Rational64::new(3, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational64::new(-3, 2));
        assert_eq!(parse_rational("2").unwrap(), Rational64::from_integer(2));
        assert_eq!(parse_rational(".5").unwrap(), Rational64::new(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn big_rational_round_trip() {
        let v = parse_big_rational("-22/7").unwrap();
        assert_eq!(format_big_rational(&v), "-22/7");
        assert_eq!(format_big_rational(&parse_big_rational("6/3").unwrap()), "2");
    }

    #[test]
    fn doubles_embed_exactly() {
        let x = 0.1f64;
        let q = <BigRational as Scalar>::from_f64(x);
        assert_eq!(Scalar::to_f64(&q), x);
    }
}
