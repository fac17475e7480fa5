//! Family identifiers and their validated configuration.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::calculus::DiagonalCorrection;
use crate::error::{Error, Result};
use crate::parallel::Workers;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    Prop45,
    Prop47,
    Prop49,
    Thm411Case2,
    Thm411Case3,
}

impl FamilyId {
    pub const ALL: [FamilyId; 5] = [
        FamilyId::Prop45,
        FamilyId::Prop47,
        FamilyId::Prop49,
        FamilyId::Thm411Case2,
        FamilyId::Thm411Case3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Prop45 => "prop45",
            FamilyId::Prop47 => "prop47",
            FamilyId::Prop49 => "prop49",
            FamilyId::Thm411Case2 => "thm411case2",
            FamilyId::Thm411Case3 => "thm411case3",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown family '{s}' (expected one of prop45, prop47, prop49, thm411case2, thm411case3)"
                ))
            })
    }
}

impl Serialize for FamilyId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// How the lacunary frequencies `n_l` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyBase {
    /// The literal sequence of the construction.
    Exact,
    /// `n_l = lead(k) · ratio^l` with the family's own lead term.
    Reduced { ratio: u64 },
}

impl fmt::Display for FrequencyBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrequencyBase::Exact => f.write_str("exact"),
            FrequencyBase::Reduced { ratio } => write!(f, "reduced(ratio {ratio})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyConfig {
    pub family: FamilyId,
    /// Space dimension `N`; the vector families also use `n = N` components.
    pub dim: usize,
    /// Derivative order `m`.
    pub order: usize,
    /// Minor degree `r`.
    pub degree: usize,
    /// Amplitude exponent `ρ`; `prop49` falls back to the midpoint of its range.
    pub rho: Option<Rational64>,
    pub s: Rational64,
    pub p: Rational64,
    pub ks: Vec<u64>,
    pub base: FrequencyBase,
    /// Smoothness class of the plateau test function.
    pub smoothness: usize,
    /// Whether to evaluate `‖u_k‖_{s,p}` per row.
    pub norms: bool,
    pub correction: DiagonalCorrection,
    pub workers: Workers,
}

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn geometric(from: u64, to: u64) -> Vec<u64> {
    std::iter::successors(Some(from), |k| Some(k * 2))
        .take_while(|k| *k <= to)
        .collect()
}

impl FamilyConfig {
    /// The configuration each family is exercised with by default.
    pub fn defaults(family: FamilyId) -> Self {
        let base = FamilyConfig {
            family,
            dim: 2,
            order: 2,
            degree: 2,
            rho: None,
            s: q(1, 2),
            p: q(3, 1),
            ks: geometric(8, 256),
            base: FrequencyBase::Exact,
            smoothness: 3,
            norms: true,
            correction: DiagonalCorrection::Gradient,
            workers: Workers::single(),
        };
        match family {
            FamilyId::Prop45 => FamilyConfig {
                rho: Some(q(3, 4)),
                ..base
            },
            FamilyId::Thm411Case2 => FamilyConfig {
                rho: Some(q(3, 5)),
                ..base
            },
            FamilyId::Prop47 => FamilyConfig {
                order: 3,
                s: q(3, 2),
                p: q(2, 1),
                ks: vec![2, 3],
                smoothness: 4,
                norms: false,
                ..base
            },
            FamilyId::Thm411Case3 => FamilyConfig {
                dim: 3,
                degree: 3,
                s: q(4, 3),
                p: q(4, 1),
                ks: vec![2, 3],
                base: FrequencyBase::Reduced { ratio: 8 },
                norms: false,
                ..base
            },
            FamilyId::Prop49 => FamilyConfig {
                dim: 3,
                p: q(3, 2),
                ks: geometric(4, 64),
                ..base
            },
        }
    }

    /// `ρ` after applying the family's default, or a config error.
    pub fn rho(&self) -> Result<Rational64> {
        match (self.rho, self.family) {
            (Some(rho), _) => Ok(rho),
            (None, FamilyId::Prop49) => {
                let (lo, hi) = self.rho_range();
                Ok((lo + hi) / q(2, 1))
            }
            (None, FamilyId::Prop47 | FamilyId::Thm411Case3) => Ok(Rational64::zero()),
            (None, family) => Err(Error::config(format!("family {family} needs --rho"))),
        }
    }

    /// Open interval admissible for `ρ`.
    pub fn rho_range(&self) -> (Rational64, Rational64) {
        let n = q(self.dim as i64, 1);
        let m = q(self.order as i64, 1);
        let r = q(self.degree as i64, 1);
        match self.family {
            FamilyId::Prop49 => (self.s - n / self.p, m - n / r - m / r),
            FamilyId::Thm411Case2 => (self.s, q(2, 1) - q(2, 1) / r),
            _ => (self.s, m - m / r),
        }
    }

    /// `m − m/r`, the critical smoothness of the lacunary families.
    pub fn critical_s(&self) -> Rational64 {
        let m = q(self.order as i64, 1);
        m - m / q(self.degree as i64, 1)
    }

    pub fn validate(&self) -> Result<()> {
        let (r, n, m) = (self.degree, self.dim, self.order);
        if r < 2 {
            return Err(Error::config(format!("degree r = {r}: every family needs r > 1")));
        }
        if r > n {
            return Err(Error::config(format!("degree r = {r} exceeds the dimension N = {n}")));
        }
        if m == 0 {
            return Err(Error::config("order m must be positive"));
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return Err(Error::config("the k schedule must be a non-empty list of positive integers"));
        }
        if self.p <= Rational64::one() || self.s <= Rational64::zero() {
            return Err(Error::config("need p > 1 and s > 0"));
        }
        match self.family {
            FamilyId::Prop45 | FamilyId::Thm411Case2 | FamilyId::Prop49 => {
                if self.family == FamilyId::Thm411Case2 && m != 2 {
                    return Err(Error::config("thm411case2 is a Hessian family: m must be 2"));
                }
                let rho = self.rho()?;
                let (lo, hi) = self.rho_range();
                if !(lo < rho && rho < hi) {
                    return Err(Error::config(format!(
                        "{}: ρ = {rho} must lie strictly between {lo} and {hi}",
                        self.family
                    )));
                }
            }
            FamilyId::Prop47 => {
                let crit = self.critical_s();
                if self.s != crit {
                    return Err(Error::config(format!(
                        "prop47 works at s = m − m/r = {crit}, not {}",
                        self.s
                    )));
                }
                if crit.is_integer() {
                    return Err(Error::config(format!("prop47 needs m − m/r non-integer, got {crit}")));
                }
            }
            FamilyId::Thm411Case3 => {
                if m != 2 {
                    return Err(Error::config("thm411case3 is a Hessian family: m must be 2"));
                }
                if r <= 2 {
                    return Err(Error::config("thm411case3 needs r > 2"));
                }
                if self.s != self.critical_s() {
                    return Err(Error::config(format!(
                        "thm411case3 works at s = 2 − 2/r = {}, not {}",
                        self.critical_s(),
                        self.s
                    )));
                }
            }
        }
        if matches!(self.family, FamilyId::Prop47 | FamilyId::Thm411Case3) && self.ks.contains(&1) {
            return Err(Error::config("the lacunary families need k ≥ 2"));
        }
        Ok(())
    }
}

/// Serialized view with rationals printed exactly.
#[derive(Serialize)]
struct ConfigView {
    family: FamilyId,
    n: usize,
    m: usize,
    r: usize,
    rho: Option<String>,
    s: String,
    p: String,
    ks: Vec<u64>,
    base: String,
    smoothness: usize,
    norms: bool,
    correction: DiagonalCorrection,
}

impl Serialize for FamilyConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigView {
            family: self.family,
            n: self.dim,
            m: self.order,
            r: self.degree,
            rho: self.rho().ok().map(|v| v.to_string()),
            s: self.s.to_string(),
            p: self.p.to_string(),
            ks: self.ks.clone(),
            base: self.base.to_string(),
            smoothness: self.smoothness,
            norms: self.norms,
            correction: self.correction,
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for id in FamilyId::ALL {
            FamilyConfig::defaults(id).validate().unwrap();
            assert_eq!(id.name().parse::<FamilyId>().unwrap(), id);
        }
    }

    #[test]
    fn prop49_midpoint() {
        let cfg = FamilyConfig::defaults(FamilyId::Prop49);
        assert_eq!(cfg.rho_range(), (q(-3, 2), q(-1, 2)));
        assert_eq!(cfg.rho().unwrap(), q(-1, 1));
    }

    #[test]
    fn constraint_violations() {
        let mut cfg = FamilyConfig::defaults(FamilyId::Prop45);
        cfg.rho = Some(q(1, 1));
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.rho = None;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        let mut cfg = FamilyConfig::defaults(FamilyId::Thm411Case3);
        cfg.degree = 1;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.degree = 2;
        cfg.s = q(1, 1);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        let mut cfg = FamilyConfig::defaults(FamilyId::Prop47);
        cfg.order = 2;
        cfg.s = q(1, 1);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        assert!("prop46".parse::<FamilyId>().is_err());
    }
}
