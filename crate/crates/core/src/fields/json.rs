//! JSON form of separable and vector fields.
//!
//! ```json
//! {"sum": [{"coeff": 1.0, "axes": [
//!   {"pieces": [{"lo": null, "hi": null,
//!                "terms": [{"c": 1.0, "a": 0, "kind": "sin", "omega": 3.0, "phi_over_pi": "1/2"}]}]}
//! ]}]}
//! ```
//!
//! A vector field is `{"components": [field, …]}`. Missing `lo`/`hi` mean
//! unbounded; `phi_over_pi` may be a number or a `"p/q"` string. A piece
//! may carry a `center`, in which case its powers are of `x - center`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::separable::{Product, SeparableField};
use super::signal::{Piece, Signal, Term, Wave};
use super::vector::VectorField;
use crate::error::{Error, Result};
use crate::scalar::parse_rational;

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Sin,
    Cos,
    One,
}

#[derive(Debug, Serialize, Deserialize)]
struct TermJson {
    c: f64,
    #[serde(default)]
    a: u32,
    kind: Kind,
    #[serde(default)]
    omega: f64,
    #[serde(default)]
    phi_over_pi: Option<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PieceJson {
    #[serde(default)]
    lo: Option<f64>,
    #[serde(default)]
    hi: Option<f64>,
    /// Powers are taken in `x - center`.
    #[serde(default, skip_serializing_if = "is_zero")]
    center: f64,
    terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SignalJson {
    pieces: Vec<PieceJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProductJson {
    coeff: f64,
    axes: Vec<SignalJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FieldJson {
    sum: Vec<ProductJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VectorJson {
    components: Vec<FieldJson>,
}

fn parse_phase(value: Option<&Value>) -> Result<Rational64> {
    match value {
        None | Some(Value::Null) => Ok(Rational64::from_integer(0)),
        Some(Value::String(s)) => parse_rational(s),
        Some(v @ Value::Number(_)) => parse_rational(&v.to_string()),
        Some(other) => Err(Error::Parse(format!("phase must be a number or string, got {other}"))),
    }
}

fn term_from(t: &TermJson) -> Result<Term> {
    let phase = parse_phase(t.phi_over_pi.as_ref())?;
    Ok(match t.kind {
        Kind::One => Term::monomial(t.c, t.a),
        Kind::Sin => Term::sin(t.c, t.a, t.omega, phase),
        Kind::Cos => Term::cos(t.c, t.a, t.omega, phase),
    })
}

fn signal_from(s: &SignalJson) -> Result<Signal> {
    let pieces = s
        .pieces
        .iter()
        .map(|p| {
            let terms = p.terms.iter().map(term_from).collect::<Result<_>>()?;
            Piece::centered(
                p.lo.unwrap_or(f64::NEG_INFINITY),
                p.hi.unwrap_or(f64::INFINITY),
                p.center,
                terms,
            )
        })
        .collect::<Result<_>>()?;
    Signal::new(pieces)
}

fn field_from(f: &FieldJson) -> Result<SeparableField> {
    let dim = f
        .sum
        .first()
        .map(|p| p.axes.len())
        .ok_or_else(|| Error::Parse("a field needs at least one product".into()))?;
    let products = f
        .sum
        .iter()
        .map(|p| {
            Ok(Product {
                coeff: p.coeff,
                factors: p.axes.iter().map(signal_from).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<_>>()?;
    SeparableField::new(dim, products)
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn signal_to(s: &Signal) -> SignalJson {
    SignalJson {
        pieces: s
            .pieces()
            .iter()
            .map(|p| PieceJson {
                lo: finite(p.lo),
                hi: finite(p.hi),
                center: p.center,
                terms: p
                    .terms
                    .iter()
                    .map(|t| TermJson {
                        c: t.coeff,
                        a: t.power,
                        kind: match t.wave {
                            Wave::One => Kind::One,
                            Wave::Sin => Kind::Sin,
                        },
                        omega: t.omega,
                        phi_over_pi: Some(Value::String(t.phase.to_string())),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn field_to(f: &SeparableField) -> FieldJson {
    FieldJson {
        sum: f
            .products()
            .iter()
            .map(|p| ProductJson {
                coeff: p.coeff,
                axes: p.factors.iter().map(signal_to).collect(),
            })
            .collect(),
    }
}

impl SeparableField {
    pub fn from_json_str(text: &str) -> Result<SeparableField> {
        let parsed: FieldJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("field JSON: {e}")))?;
        field_from(&parsed).map_err(as_parse)
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(field_to(self)).expect("field serializes")
    }
}

impl VectorField {
    /// Accepts either `{"components": […]}` or a single scalar field.
    pub fn from_json_str(text: &str) -> Result<VectorField> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("field JSON: {e}")))?;
        let fields: Vec<FieldJson> = if value.get("components").is_some() {
            let v: VectorJson = serde_json::from_value(value)
                .map_err(|e| Error::Parse(format!("vector field JSON: {e}")))?;
            v.components
        } else {
            vec![serde_json::from_value(value).map_err(|e| Error::Parse(format!("field JSON: {e}")))?]
        };
        let comps = fields.iter().map(field_from).collect::<Result<_>>().map_err(as_parse)?;
        VectorField::separable(comps).map_err(as_parse)
    }

    /// Serializes separable components; radial components are rejected.
    pub fn to_json_value(&self) -> Result<Value> {
        let comps = self.separable_components()?;
        let v = VectorJson {
            components: comps.into_iter().map(field_to).collect(),
        };
        Ok(serde_json::to_value(v).expect("field serializes"))
    }
}

fn as_parse(e: Error) -> Error {
    match e {
        Error::Domain(msg) => Error::Parse(msg),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let text = r#"{"sum":[{"coeff":2.0,"axes":[
            {"pieces":[{"lo":null,"hi":null,"terms":[{"c":1.0,"a":0,"kind":"sin","omega":1.0,"phi_over_pi":0}]}]},
            {"pieces":[{"lo":0,"hi":1,"terms":[{"c":1.0,"a":1,"kind":"one"}]}]}
        ]}]}"#;
        let f = SeparableField::from_json_str(text).unwrap();
        assert_eq!(f.dim(), 2);
        let x = [0.7, 0.5];
        assert!((f.eval(&x) - 2.0 * 0.7f64.sin() * 0.5).abs() < 1e-15);
        assert_eq!(f.eval(&[0.7, 1.5]), 0.0);
    }

    #[test]
    fn round_trip() {
        let f = SeparableField::from_factors(
            -1.5,
            vec![
                Signal::cos(1.0, 2.0, Rational64::new(1, 3)),
                Signal::polynomial_on(&[1.0, 0.0, 2.0], -1.0, 1.0).unwrap(),
            ],
        );
        let text = f.to_json_value().to_string();
        let g = SeparableField::from_json_str(&text).unwrap();
        assert_eq!(f, g);
        let u = VectorField::separable(vec![f.clone(), g]).unwrap();
        let back = VectorField::from_json_str(&u.to_json_value().unwrap().to_string()).unwrap();
        assert_eq!(u, back);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(SeparableField::from_json_str("{"), Err(Error::Parse(_))));
        assert!(matches!(SeparableField::from_json_str(r#"{"sum":[]}"#), Err(Error::Parse(_))));
        let overlapping = r#"{"sum":[{"coeff":1,"axes":[{"pieces":[
            {"lo":0,"hi":2,"terms":[{"c":1,"kind":"one"}]},
            {"lo":1,"hi":3,"terms":[{"c":1,"kind":"one"}]}]}]}]}"#;
        assert!(matches!(SeparableField::from_json_str(overlapping), Err(Error::Parse(_))));
        let ragged = r#"{"sum":[{"coeff":1,"axes":[{"pieces":[]}]},{"coeff":1,"axes":[{"pieces":[]},{"pieces":[]}]}]}"#;
        assert!(SeparableField::from_json_str(ragged).is_err());
    }
}
