//! Separable counterexample families: the oscillating family, the Hessian
//! family, and the two lacunary families.

use num_rational::Rational64;
use serde::Serialize;

use super::config::{FamilyConfig, FamilyId, FrequencyBase};
use crate::error::{Error, Result};
use crate::fields::{plateau_field, SeparableField, Signal, Term, VectorField};
use crate::hypermatrix::MinorSpec;
use crate::multiindex::MultiIndex;
use crate::scalar::rational_to_f64;

/// Largest frequency whose integer products stay exact in `f64`.
pub const MAX_EXACT_FREQUENCY: f64 = 9_007_199_254_740_992.0;

/// One member `u_k` of a separable family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub k: u64,
    /// Vector field, or the single-component scalar field for the Hessian
    /// families.
    pub field: VectorField,
    /// Lacunary frequencies, empty for the single-frequency families.
    pub frequencies: Vec<f64>,
    /// Per-atom row fields for the diagonal / off-diagonal split.
    pub atoms: Vec<Vec<SeparableField>>,
    /// Factor applied to the reported fields (`(ln k)^{-1/(2r)}` for the
    /// lacunary families).
    pub weight: f64,
}

/// `u_k` for every `k` together with the shared test function.
#[derive(Debug, Clone)]
pub struct Family {
    pub id: FamilyId,
    pub psi: SeparableField,
    pub order: usize,
    pub spec: MinorSpec,
    /// `true` when the minor is an ordinary Hessian minor of a scalar field.
    pub scalar: bool,
    pub members: Vec<FamilyMember>,
}

impl Family {
    /// Selectors `α^1..α^m` without the component selector.
    pub fn alphas(&self) -> &[MultiIndex] {
        if self.scalar {
            self.spec.selectors()
        } else {
            &self.spec.selectors()[1..]
        }
    }
}

fn sin_squared(omega: f64) -> Signal {
    Signal::global(vec![
        Term::monomial(0.5, 0),
        Term::cos(-0.5, 0, 2.0 * omega, Rational64::from_integer(0)),
    ])
}

fn pow_rational(base: f64, exp: Rational64) -> f64 {
    base.powf(rational_to_f64(exp))
}

/// Factors for `Π_{j<r} f_j(x_j) · g(x_r)`, constant along the other axes.
fn lead_factors(dim: usize, r: usize, first: impl Fn() -> Signal, last: Signal) -> Vec<Signal> {
    (1..=dim)
        .map(|axis| match axis {
            a if a < r => first(),
            a if a == r => last.clone(),
            _ => Signal::constant(1.0),
        })
        .collect()
}

fn diagonal_spec(cfg: &FamilyConfig, scalar: bool) -> Result<MinorSpec> {
    let alpha = MultiIndex::leading(cfg.degree, cfg.dim)?;
    if scalar {
        MinorSpec::new(vec![alpha; cfg.order])
    } else {
        MinorSpec::hyper_jacobian(alpha.clone(), vec![alpha; cfg.order])
    }
}

fn family_of(cfg: &FamilyConfig, expected: FamilyId) -> Result<()> {
    if cfg.family != expected {
        return Err(Error::config(format!(
            "configuration is for {}, not {expected}",
            cfg.family
        )));
    }
    cfg.validate()
}

fn pad_components(mut comps: Vec<SeparableField>, dim: usize) -> Result<VectorField> {
    while comps.len() < dim {
        comps.push(SeparableField::zero(dim));
    }
    VectorField::separable(comps)
}

/// `u^i = k^{-ρ} sin(k x_i)` for `i < r`,
/// `u^r = k^{-ρ} x_r^m Π_{j<r} sin(mπ/2 + k x_j)`, zero beyond.
pub fn family_prop45(cfg: &FamilyConfig) -> Result<Family> {
    family_of(cfg, FamilyId::Prop45)?;
    let (n, m, r) = (cfg.dim, cfg.order, cfg.degree);
    let rho = cfg.rho()?;
    let phase = Rational64::new(m as i64, 2);
    let members = cfg
        .ks
        .iter()
        .map(|&k| {
            let kf = k as f64;
            let amp = pow_rational(kf, -rho);
            let mut comps: Vec<SeparableField> = (1..r)
                .map(|i| SeparableField::along(n, i, Signal::sin(amp, kf, Rational64::from_integer(0))))
                .collect::<Result<_>>()?;
            comps.push(SeparableField::from_factors(
                amp,
                lead_factors(n, r, || Signal::sin(1.0, kf, phase), Signal::monomial(1.0, m as u32)),
            ));
            Ok(FamilyMember {
                k,
                field: pad_components(comps, n)?,
                frequencies: vec![kf],
                atoms: Vec::new(),
                weight: 1.0,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Family {
        id: FamilyId::Prop45,
        psi: plateau_field(n, cfg.smoothness),
        order: m,
        spec: diagonal_spec(cfg, false)?,
        scalar: false,
        members,
    })
}

/// Scalar `u_k = k^{-ρ} x_r Π_{i<r} sin²(k x_i)` for the Hessian minor.
pub fn family_thm411_case2(cfg: &FamilyConfig) -> Result<Family> {
    family_of(cfg, FamilyId::Thm411Case2)?;
    let (n, r) = (cfg.dim, cfg.degree);
    let rho = cfg.rho()?;
    let members = cfg
        .ks
        .iter()
        .map(|&k| {
            let kf = k as f64;
            let u = SeparableField::from_factors(
                pow_rational(kf, -rho),
                lead_factors(n, r, || sin_squared(kf), Signal::monomial(1.0, 1)),
            );
            Ok(FamilyMember {
                k,
                field: VectorField::separable(vec![u])?,
                frequencies: vec![kf],
                atoms: Vec::new(),
                weight: 1.0,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Family {
        id: FamilyId::Thm411Case2,
        psi: plateau_field(n, cfg.smoothness),
        order: 2,
        spec: diagonal_spec(cfg, true)?,
        scalar: true,
        members,
    })
}

fn checked_frequencies(lead: f64, ratio: f64, k: u64) -> Result<Vec<f64>> {
    let freqs: Vec<f64> = (1..=k as i32).map(|l| lead * ratio.powi(l)).collect();
    match freqs.iter().find(|f| !(**f <= MAX_EXACT_FREQUENCY)) {
        Some(f) => Err(Error::Resource(format!(
            "lacunary frequency {f:e} exceeds the exact-integration range 2^53"
        ))),
        None => Ok(freqs),
    }
}

/// `n_l = ⌈k^{r²/m}⌉ · ratio^l`, `l = 1..=k`, with ratio 8 unless reduced.
pub fn prop47_frequencies(cfg: &FamilyConfig, k: u64) -> Result<Vec<f64>> {
    let (m, r) = (cfg.order as f64, cfg.degree as f64);
    let lead = (k as f64).powf(r * r / m).ceil();
    let ratio = match cfg.base {
        FrequencyBase::Exact => 8,
        FrequencyBase::Reduced { ratio } => ratio,
    };
    checked_frequencies(lead, ratio as f64, k)
}

/// `n_l = k^{r^{3l}}` only exists in reduced form, `k · ratio^l`.
pub fn case3_frequencies(cfg: &FamilyConfig, k: u64) -> Result<Vec<f64>> {
    match cfg.base {
        FrequencyBase::Exact => {
            let exponent = (cfg.degree as f64).powi(3);
            Err(Error::Resource(format!(
                "n_1 = {k}^{exponent} is beyond exact integration; use a reduced base"
            )))
        }
        FrequencyBase::Reduced { ratio } => checked_frequencies(k as f64, ratio as f64, k),
    }
}

/// The three inequalities the lacunary estimate relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lacunarity {
    /// `n_i / n_j ≤ |n_i − n_j|` for `i ≠ j`.
    pub ratio_bound: bool,
    /// `min |n_i − n_j| ≥ k^{r²/(m(r−1))}`.
    pub separation: bool,
    /// At most one `n_l` in each dyadic block `[2^{j−1}, 2^j)`.
    pub dyadic: bool,
}

impl Lacunarity {
    pub fn holds(&self) -> bool {
        self.ratio_bound && self.separation && self.dyadic
    }
}

pub fn check_lacunarity(freqs: &[f64], k: u64, order: usize, degree: usize) -> Lacunarity {
    let mut ratio_bound = true;
    let mut min_gap = f64::INFINITY;
    for (i, a) in freqs.iter().enumerate() {
        for (j, b) in freqs.iter().enumerate() {
            if i != j {
                ratio_bound &= a / b <= (a - b).abs();
                min_gap = min_gap.min((a - b).abs());
            }
        }
    }
    let (m, r) = (order as f64, degree as f64);
    let separation = min_gap >= (k as f64).powf(r * r / (m * (r - 1.0)));
    let mut blocks: Vec<i32> = freqs.iter().map(|f| f.log2().floor() as i32).collect();
    blocks.sort_unstable();
    let dyadic = blocks.windows(2).all(|w| w[0] != w[1]);
    Lacunarity {
        ratio_bound,
        separation,
        dyadic,
    }
}

/// `v^i = Σ_l sin(n_l x_i) / (n_l^s (l+1)^{1/r})` for `i < r` and
/// `v^r = x_r^m Σ_l Π_{j<r} sin(mπ/2 + n_l x_j) / (n_l^s (l+1)^{1/r})`;
/// the reported field is `u_k = (ln k)^{-1/(2r)} v_k`.
pub fn family_prop47(cfg: &FamilyConfig) -> Result<Family> {
    family_of(cfg, FamilyId::Prop47)?;
    let (n, m, r) = (cfg.dim, cfg.order, cfg.degree);
    let s = rational_to_f64(cfg.s);
    let phase = Rational64::new(m as i64, 2);
    let members = cfg
        .ks
        .iter()
        .map(|&k| {
            let freqs = prop47_frequencies(cfg, k)?;
            let atoms: Vec<Vec<SeparableField>> = freqs
                .iter()
                .enumerate()
                .map(|(idx, &nl)| {
                    let c = 1.0 / (nl.powf(s) * ((idx + 2) as f64).powf(1.0 / r as f64));
                    let mut rows: Vec<SeparableField> = (1..r)
                        .map(|i| SeparableField::along(n, i, Signal::sin(c, nl, Rational64::from_integer(0))))
                        .collect::<Result<_>>()?;
                    rows.push(SeparableField::from_factors(
                        c,
                        lead_factors(n, r, || Signal::sin(1.0, nl, phase), Signal::monomial(1.0, m as u32)),
                    ));
                    Ok(rows)
                })
                .collect::<Result<_>>()?;
            let weight = (k as f64).ln().powf(-1.0 / (2.0 * r as f64));
            let comps: Vec<SeparableField> = (0..r)
                .map(|i| {
                    atoms
                        .iter()
                        .fold(SeparableField::zero(n), |acc, a| acc.add(&a[i]))
                        .scaled(weight)
                })
                .collect();
            Ok(FamilyMember {
                k,
                field: pad_components(comps, n)?,
                frequencies: freqs,
                atoms,
                weight,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Family {
        id: FamilyId::Prop47,
        psi: plateau_field(n, cfg.smoothness),
        order: m,
        spec: diagonal_spec(cfg, false)?,
        scalar: false,
        members,
    })
}

/// Scalar `u_k = (ln k)^{-1/(2r)} x_r Σ_l Π_{i<r} sin²(n_l x_i) /
/// (n_l^{2−2/r} l^{1/r})` for the Hessian minor. Atoms carry the gradient
/// rows `∂_c` of each summand, the first selector of the minor.
pub fn family_thm411_case3(cfg: &FamilyConfig) -> Result<Family> {
    family_of(cfg, FamilyId::Thm411Case3)?;
    let (n, r) = (cfg.dim, cfg.degree);
    let decay = 2.0 - 2.0 / r as f64;
    let members = cfg
        .ks
        .iter()
        .map(|&k| {
            let freqs = case3_frequencies(cfg, k)?;
            let summands: Vec<SeparableField> = freqs
                .iter()
                .enumerate()
                .map(|(idx, &nl)| {
                    let c = 1.0 / (nl.powf(decay) * ((idx + 1) as f64).powf(1.0 / r as f64));
                    SeparableField::from_factors(
                        c,
                        lead_factors(n, r, || sin_squared(nl), Signal::monomial(1.0, 1)),
                    )
                })
                .collect();
            let atoms = summands
                .iter()
                .map(|a| (1..=r).map(|c| a.partial(&[c])).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?;
            let weight = (k as f64).ln().powf(-1.0 / (2.0 * r as f64));
            let u = summands
                .iter()
                .fold(SeparableField::zero(n), |acc, a| acc.add(a))
                .scaled(weight);
            Ok(FamilyMember {
                k,
                field: VectorField::separable(vec![u])?,
                frequencies: freqs,
                atoms,
                weight,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Family {
        id: FamilyId::Thm411Case3,
        psi: plateau_field(n, cfg.smoothness),
        order: 2,
        spec: diagonal_spec(cfg, true)?,
        scalar: true,
        members,
    })
}

/// Dispatches to the separable family of `cfg`.
pub fn separable_family(cfg: &FamilyConfig) -> Result<Family> {
    match cfg.family {
        FamilyId::Prop45 => family_prop45(cfg),
        FamilyId::Prop47 => family_prop47(cfg),
        FamilyId::Thm411Case2 => family_thm411_case2(cfg),
        FamilyId::Thm411Case3 => family_thm411_case3(cfg),
        FamilyId::Prop49 => Err(Error::config("prop49 is a radial scaling family")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{integrate_exact, BoxDomain};
    use crate::fields::{atom_split, scalar_minor_expand, MinorField};
    use crate::multiindex::factorial;
    use std::f64::consts::PI;

    fn omega() -> BoxDomain {
        BoxDomain::cube(2, 0.0, PI).unwrap()
    }

    #[test]
    fn prop45_member_matches_formula() {
        let mut cfg = FamilyConfig::defaults(FamilyId::Prop45);
        cfg.ks = vec![8];
        let fam = family_prop45(&cfg).unwrap();
        let u = &fam.members[0].field;
        let amp = 8f64.powf(-0.75);
        for x in [[0.3, 1.1], [2.0, 0.4], [1.3, 2.9]] {
            let v = u.eval(&x);
            assert!((v[0] - amp * (8.0 * x[0]).sin()).abs() < 1e-14);
            let want = amp * x[1] * x[1] * (PI + 8.0 * x[0]).sin();
            assert!((v[1] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn prop45_minor_closed_form() {
        // m! k^{mr−m−ρr} Π sin²(mπ/2 + k x_j)
        let mut cfg = FamilyConfig::defaults(FamilyId::Prop45);
        cfg.ks = vec![16];
        let fam = family_prop45(&cfg).unwrap();
        let minor = MinorField::new(&fam.members[0].field, 2, fam.spec.clone()).unwrap();
        for x in [[0.3, 1.1], [2.0, 0.4]] {
            let want = 2.0 * 16f64.powf(0.5) * (PI + 16.0 * x[0]).sin().powi(2);
            let got = minor.value(&x).unwrap();
            assert!((got - want).abs() < 1e-11 * want.abs().max(1.0), "{got} {want}");
        }
    }

    #[test]
    fn case2_minor_closed_form_and_replicated_route() {
        // r = 2: det = −k^{2−2ρ} sin²(2 k x_1)
        let mut cfg = FamilyConfig::defaults(FamilyId::Thm411Case2);
        cfg.ks = vec![8];
        let fam = family_thm411_case2(&cfg).unwrap();
        let v = fam.members[0].field.separable_components().unwrap()[0].clone();
        let minor = scalar_minor_expand(&v, fam.alphas()).unwrap();
        let replicated = VectorField::separable(vec![v.clone(), v.clone()]).unwrap();
        let alpha = MultiIndex::leading(2, 2).unwrap();
        let spec = MinorSpec::hyper_jacobian(alpha.clone(), vec![alpha.clone(), alpha]).unwrap();
        let via_vector = MinorField::new(&replicated, 2, spec).unwrap();
        for x in [[0.3f64, 1.1], [2.0, 0.4], [0.9, 2.2]] {
            let want = -(8f64.powf(2.0 - 1.2)) * (16.0 * x[0]).sin().powi(2);
            assert!((minor.eval(&x) - want).abs() < 1e-11);
            assert!((via_vector.value(&x).unwrap() - 2.0 * want).abs() < 1e-11);
        }
        let psi = &fam.psi;
        let a = integrate_exact(&minor.product(psi), &omega()).unwrap();
        let b = integrate_exact(&via_vector.expand().unwrap().product(psi), &omega()).unwrap();
        assert!((2.0 * a - b).abs() <= 1e-12 * b.abs());
    }

    #[test]
    fn prop47_frequencies_and_lacunarity() {
        let cfg = FamilyConfig::defaults(FamilyId::Prop47);
        assert_eq!(prop47_frequencies(&cfg, 2).unwrap(), vec![24.0, 192.0]);
        assert_eq!(prop47_frequencies(&cfg, 3).unwrap(), vec![40.0, 320.0, 2560.0]);
        for k in [2, 3, 5] {
            let f = prop47_frequencies(&cfg, k).unwrap();
            assert!(check_lacunarity(&f, k, 3, 2).holds());
        }
        assert!(!check_lacunarity(&[16.0, 24.0], 2, 3, 2).dyadic);
        assert!(matches!(prop47_frequencies(&cfg, 40), Err(Error::Resource(_))));
    }

    #[test]
    fn prop47_diagonal_is_closed_form() {
        // m! Σ_l 1/(l+1) Π_{j<r} sin²(mπ/2 + n_l x_j), up to the overall weight
        let mut cfg = FamilyConfig::defaults(FamilyId::Prop47);
        cfg.ks = vec![2];
        let fam = family_prop47(&cfg).unwrap();
        let member = &fam.members[0];
        let split = atom_split(&member.atoms, fam.alphas(), fam.spec.sign()).unwrap();
        let m = factorial(3) as f64;
        for x in [[0.3, 1.1], [2.0, 0.4], [1.7, 2.5]] {
            let want: f64 = member
                .frequencies
                .iter()
                .enumerate()
                .map(|(i, &nl)| m / (i + 2) as f64 * (1.5 * PI + nl * x[0]).sin().powi(2))
                .sum();
            let got = split.diagonal.eval(&x);
            assert!((got - want).abs() < 1e-9 * want.max(1.0), "{got} {want}");
        }
    }

    #[test]
    fn case3_requires_reduced_base() {
        let mut cfg = FamilyConfig::defaults(FamilyId::Thm411Case3);
        assert_eq!(case3_frequencies(&cfg, 3).unwrap(), vec![24.0, 192.0, 1536.0]);
        cfg.base = FrequencyBase::Exact;
        assert!(matches!(family_thm411_case3(&cfg), Err(Error::Resource(_))));
    }

    #[test]
    fn case3_atoms_rebuild_the_minor() {
        let mut cfg = FamilyConfig::defaults(FamilyId::Thm411Case3);
        cfg.ks = vec![2];
        let fam = family_thm411_case3(&cfg).unwrap();
        let member = &fam.members[0];
        let split = atom_split(&member.atoms, &fam.alphas()[1..], fam.spec.sign()).unwrap();
        let v = member.field.separable_components().unwrap()[0];
        let direct = scalar_minor_expand(v, fam.alphas()).unwrap();
        let w3 = member.weight.powi(3);
        for x in [[0.3, 1.1, 0.7], [2.0, 0.4, 2.9]] {
            let a = direct.eval(&x);
            let b = w3 * split.full.eval(&x);
            assert!((a - b).abs() < 1e-10 * direct.magnitude(&x).max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn wrong_family_is_rejected() {
        let cfg = FamilyConfig::defaults(FamilyId::Prop45);
        assert!(family_prop47(&cfg).is_err());
        assert!(separable_family(&FamilyConfig::defaults(FamilyId::Prop49)).is_err());
    }
}
