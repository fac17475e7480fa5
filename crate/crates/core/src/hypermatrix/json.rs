//! JSON form of a hypermatrix:
//! `{"orders": [...], "scalar": "f64" | "rational", "entries": [...]}`.
//!
//! Entries are row-major with the last index fastest. Rationals are written
//! as `"p/q"` strings. On input `orders` may be omitted when `entries` is a
//! nested array, in which case the shape is read off the nesting. A bare
//! nested array is shorthand for `{"entries": ...}` in f64 mode.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DetOptions, HyperMatrix, MinorSpec};
use crate::error::{Error, Result};
use crate::scalar::{format_big_rational, parse_big_rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    #[default]
    F64,
    Rational,
}

/// A hypermatrix in either scalar mode.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    F64(HyperMatrix<f64>),
    Rational(HyperMatrix<BigRational>),
}

#[derive(Deserialize)]
struct RawMatrix {
    #[serde(default)]
    orders: Option<Vec<usize>>,
    #[serde(default)]
    scalar: ScalarKind,
    entries: Value,
}

fn flatten(value: &Value, depth: usize, shape: &mut Vec<usize>, out: &mut Vec<Value>) -> Result<()> {
    match value {
        Value::Array(items) => {
            if shape.len() == depth {
                shape.push(items.len());
            } else if shape[depth] != items.len() {
                return Err(Error::Parse("ragged nested entries".into()));
            }
            for item in items {
                flatten(item, depth + 1, shape, out)?;
            }
            Ok(())
        }
        other => {
            if depth != shape.len() {
                return Err(Error::Parse("ragged nested entries".into()));
            }
            out.push(other.clone());
            Ok(())
        }
    }
}

fn to_f64(value: &Value) -> Result<f64> {
    match value {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("bad number {n}"))),
        Value::String(s) => {
            if let Ok(v) = s.trim().parse::<f64>() {
                return Ok(v);
            }
            Ok(crate::scalar::Scalar::to_f64(&parse_big_rational(s)?))
        }
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

fn to_rational(value: &Value) -> Result<BigRational> {
    match value {
        Value::Number(n) => parse_big_rational(&n.to_string()),
        Value::String(s) => parse_big_rational(s),
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

impl AnyMatrix {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let raw: RawMatrix = match value {
            Value::Array(_) => RawMatrix {
                orders: None,
                scalar: ScalarKind::F64,
                entries: value,
            },
            other => serde_json::from_value(other)?,
        };
        let mut shape = Vec::new();
        let mut flat = Vec::new();
        if !raw.entries.is_array() {
            return Err(Error::Parse("entries must be an array".into()));
        }
        flatten(&raw.entries, 0, &mut shape, &mut flat)?;
        let orders = match raw.orders {
            Some(orders) => {
                if shape.len() > 1 && shape != orders {
                    return Err(Error::Parse(format!(
                        "nested entries have shape {shape:?} but orders are {orders:?}"
                    )));
                }
                orders
            }
            None => shape,
        };
        let wrap = |e: Error| match e {
            Error::Domain(msg) => Error::Parse(msg),
            other => other,
        };
        match raw.scalar {
            ScalarKind::F64 => {
                let entries = flat.iter().map(to_f64).collect::<Result<Vec<_>>>()?;
                Ok(AnyMatrix::F64(HyperMatrix::new(orders, entries).map_err(wrap)?))
            }
            ScalarKind::Rational => {
                let entries = flat.iter().map(to_rational).collect::<Result<Vec<_>>>()?;
                Ok(AnyMatrix::Rational(
                    HyperMatrix::new(orders, entries).map_err(wrap)?,
                ))
            }
        }
    }

    pub fn to_json_value(&self) -> Value {
        match self {
            AnyMatrix::F64(a) => serde_json::json!({
                "orders": a.orders(),
                "scalar": "f64",
                "entries": a.entries(),
            }),
            AnyMatrix::Rational(a) => serde_json::json!({
                "orders": a.orders(),
                "scalar": "rational",
                "entries": a.entries().iter().map(format_big_rational).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            AnyMatrix::F64(_) => ScalarKind::F64,
            AnyMatrix::Rational(_) => ScalarKind::Rational,
        }
    }

    pub fn orders(&self) -> &[usize] {
        match self {
            AnyMatrix::F64(a) => a.orders(),
            AnyMatrix::Rational(a) => a.orders(),
        }
    }

    /// Determinant rendered as text (`"p/q"` in rational mode).
    pub fn det_text(&self, options: &DetOptions, fold: bool) -> Result<String> {
        Ok(match self {
            AnyMatrix::F64(a) => {
                let v = if fold { a.det_layer_fold(options)? } else { a.det_full(options)? };
                format_f64(v)
            }
            AnyMatrix::Rational(a) => {
                let v = if fold { a.det_layer_fold(options)? } else { a.det_full(options)? };
                format_big_rational(&v)
            }
        })
    }

    pub fn minor_det_text(&self, spec: &MinorSpec, options: &DetOptions) -> Result<String> {
        Ok(match self {
            AnyMatrix::F64(a) => format_f64(a.minor_det(spec, options)?),
            AnyMatrix::Rational(a) => format_big_rational(&a.minor_det(spec, options)?),
        })
    }
}

/// Shortest round-trip form, with negative zero printed as `0`.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}
