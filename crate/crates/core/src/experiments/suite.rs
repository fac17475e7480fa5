//! Randomized identity suites over determinants, minors and the
//! integration-by-parts formula.
//!
//! Every trial draws from its own ChaCha stream keyed by check and trial
//! index, so reports do not depend on the worker count.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::calculus::{ibp_identity_check, BoxDomain};
use crate::error::{Error, Result};
use crate::fields::{
    extension_default, extension_power, hyper_jacobian, regrouped_expansion, regrouped_value,
    plateau_field, scalar_minor_value, Component, JacobianEvaluator, MinorField, SeparableField,
    Signal, Term, VectorField,
};
use crate::hypermatrix::{laplace_expand, minor_difference_bound, AnyMatrix, DetOptions, HyperMatrix, MinorSpec};
use crate::multiindex::{enumerate, factorial, MultiIndex, Sign};
use crate::parallel::{par_map, Workers};

/// Relative error allowed in the double-precision field laws.
pub const FIELD_LAW_RTOL: f64 = 1e-9;
/// Relative error allowed in the integration-by-parts identity.
pub const IBP_RTOL: f64 = 1e-8;
/// Triples whose left side is smaller than this are redrawn.
pub const IBP_MIN_LHS: f64 = 1e-6;
/// Failures whose inputs are kept in a report, per check.
pub const RECORDED_FAILURES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Ibp,
    Bounds,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "ibp" => Ok(Suite::Ibp),
            "bounds" => Ok(Suite::Bounds),
            "all" => Ok(Suite::All),
            other => Err(Error::config(format!(
                "unknown suite '{other}' (expected lemmas, ibp, bounds or all)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lemmas => "lemmas",
            Suite::Ibp => "ibp",
            Suite::Bounds => "bounds",
            Suite::All => "all",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Trials per combinatorial check.
    pub trials: usize,
    /// Random fields per field law.
    pub field_trials: usize,
    /// Evaluation points per random field.
    pub points: usize,
    /// Triples per `(m, N)` in the integration-by-parts check.
    pub ibp_trials: usize,
    pub ibp_orders: Vec<usize>,
    /// Matrix pairs for the difference bound.
    pub bound_pairs: usize,
    pub workers: Workers,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            trials: 200,
            field_trials: 50,
            points: 100,
            ibp_trials: 10,
            ibp_orders: vec![1, 2],
            bound_pairs: 10_000,
            workers: Workers::single(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub detail: String,
    pub input: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    /// `exact` or `double`.
    pub mode: &'static str,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Largest relative error seen, for the double-precision checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct Outcome {
    pass: bool,
    error: Option<f64>,
    detail: String,
    input: Value,
}

impl Outcome {
    fn exact(pass: bool, detail: impl Into<String>, input: Value) -> Self {
        Outcome {
            pass,
            error: None,
            detail: detail.into(),
            input,
        }
    }

    fn measured(error: f64, tolerance: f64, detail: impl Into<String>, input: Value) -> Self {
        Outcome {
            pass: error <= tolerance,
            error: Some(error),
            detail: detail.into(),
            input,
        }
    }

    fn from_error(e: Error, input: Value) -> Self {
        Outcome::exact(false, format!("error: {e}"), input)
    }
}

fn trial_rng(seed: u64, check: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((check << 32) | trial as u64);
    rng
}

fn run_check(
    name: &str,
    mode: &'static str,
    id: u64,
    trials: usize,
    cfg: &SuiteConfig,
    trial: impl Fn(&mut ChaCha8Rng, usize) -> Outcome + Sync,
) -> CheckReport {
    let indices: Vec<usize> = (0..trials).collect();
    let outcomes = par_map(cfg.workers, &indices, |&t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        trial(&mut rng, t)
    });
    let mut report = CheckReport {
        name: name.to_string(),
        mode,
        trials,
        passed: 0,
        failed: 0,
        max_error: None,
        failures: Vec::new(),
    };
    for (t, o) in outcomes.into_iter().enumerate() {
        if let Some(e) = o.error {
            report.max_error = Some(report.max_error.map_or(e, |m: f64| m.max(e)));
        }
        if o.pass {
            report.passed += 1;
        } else {
            report.failed += 1;
            if report.failures.len() < RECORDED_FAILURES {
                report.failures.push(Failure {
                    trial: t,
                    detail: o.detail,
                    input: o.input,
                });
            }
        }
    }
    report
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(
        BigInt::from(rng.random_range(-9i64..=9)),
        BigInt::from(rng.random_range(1i64..=5)),
    )
}

fn random_matrix(rng: &mut ChaCha8Rng, orders: Vec<usize>) -> HyperMatrix<BigRational> {
    HyperMatrix::from_fn(orders, |_| random_rational(rng)).expect("positive orders")
}

fn matrix_json(a: &HyperMatrix<BigRational>) -> Value {
    AnyMatrix::Rational(a.clone()).to_json_value()
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

fn random_index(rng: &mut ChaCha8Rng, k: usize, n: usize) -> MultiIndex {
    pick(rng, &enumerate(k, n).expect("k ≤ n")).clone()
}

fn spec_json(spec: &MinorSpec) -> Value {
    json!(spec.selectors().iter().map(|s| s.entries().to_vec()).collect::<Vec<_>>())
}

fn layer_swap(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let m = rng.random_range(2..=4);
    let n = rng.random_range(2..=4);
    let a = random_matrix(rng, vec![n; m]);
    let i = rng.random_range(1..=m);
    let j1 = rng.random_range(1..=n);
    let j2 = (j1 + rng.random_range(1..n) - 1) % n + 1;
    let opts = DetOptions::default();
    let before = a.det_full(&opts)?;
    let after = a.swap_layers(i, j1, j2)?.det_full(&opts)?;
    let sign = if i == 1 { Sign::Minus.pow(m - 1) } else { Sign::Minus };
    Ok(Outcome::exact(
        after == sign.apply(before),
        format!("swapping {i}-layers {j1} and {j2}"),
        json!({"matrix": matrix_json(&a), "direction": i, "layers": [j1, j2]}),
    ))
}

fn transposition(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let m = rng.random_range(2..=4);
    let n = rng.random_range(1..=4);
    let a = random_matrix(rng, vec![n; m]);
    let pairs: Vec<(usize, usize)> = (1..=m)
        .flat_map(|i| (i + 1..=m).map(move |j| (i, j)))
        .filter(|&(i, _)| m % 2 == 0 || i > 1)
        .collect();
    let (i, j) = *pick(rng, &pairs);
    let opts = DetOptions::default();
    let pass = a.transpose(i, j)?.det_full(&opts)? == a.det_full(&opts)?;
    Ok(Outcome::exact(
        pass,
        format!("({i},{j})-transposition"),
        json!({"matrix": matrix_json(&a), "directions": [i, j]}),
    ))
}

fn ordinary(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let n = rng.random_range(1..=4);
    let a = random_matrix(rng, vec![n, n]);
    let full = MultiIndex::leading(n, n)?;
    let hyper = a.det_full(&DetOptions::default())?;
    let eliminated = a.ordinary_det()?;
    let cofactor = laplace_expand(&a, &full, &full, 1)?;
    Ok(Outcome::exact(
        hyper == eliminated && hyper == cofactor,
        "full determinant vs elimination vs cofactor expansion",
        json!({"matrix": matrix_json(&a)}),
    ))
}

fn laplace(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let rows = rng.random_range(1..=4);
    let cols = rng.random_range(1..=4);
    let a = random_matrix(rng, vec![rows, cols]);
    let r = rng.random_range(1..=rows.min(cols));
    let beta = random_index(rng, r, rows);
    let alpha = random_index(rng, r, cols);
    let spec = MinorSpec::new(vec![beta.clone(), alpha.clone()])?;
    let expected = a.minor_det(&spec, &DetOptions::default())?;
    let mut pass = true;
    for &i in beta.entries() {
        pass &= laplace_expand(&a, &alpha, &beta, i)? == expected;
    }
    Ok(Outcome::exact(
        pass,
        "Laplace expansion along every selected row",
        json!({"matrix": matrix_json(&a), "beta": beta.entries(), "alpha": alpha.entries()}),
    ))
}

fn fold(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let m = rng.random_range(1..=4);
    let n = rng.random_range(1..=4);
    let a = random_matrix(rng, vec![n; m]);
    let opts = DetOptions::default();
    Ok(Outcome::exact(
        a.det_layer_fold(&opts)? == a.det_full(&opts)?,
        "layer fold vs full determinant",
        json!({"matrix": matrix_json(&a)}),
    ))
}

fn random_signal(rng: &mut ChaCha8Rng) -> Signal {
    let terms = (0..rng.random_range(1..=2))
        .map(|_| {
            let c = rng.random_range(-1.0..1.0);
            let a = rng.random_range(0..3u32);
            if rng.random_bool(0.7) {
                let w = rng.random_range(1..4) as f64;
                Term::sin(c, a, w, Rational64::new(rng.random_range(0..4), 4))
            } else {
                Term::monomial(c, a)
            }
        })
        .collect();
    Signal::global(terms)
}

fn random_field(rng: &mut ChaCha8Rng, dim: usize) -> SeparableField {
    (0..2).fold(SeparableField::zero(dim), |acc, _| {
        let factors = (0..dim).map(|_| random_signal(rng)).collect();
        acc.add(&SeparableField::from_factors(rng.random_range(0.5..1.5), factors))
    })
}

fn field_json(u: &VectorField) -> Value {
    u.to_json_value().unwrap_or(Value::Null)
}

/// `(m, r)` cycles through `{1,2,3} × {2,3}` with the trial index.
fn law_shape(trial: usize) -> (usize, usize) {
    (1 + trial % 3, 2 + (trial / 3) % 2)
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect()
}

/// Error measured against `(r!)^m ‖D^m u(x)‖∞^r`, which bounds every term
/// of the determinant sum.
fn term_scale(u: &VectorField, m: usize, r: usize, x: &[f64]) -> Result<f64> {
    let top = hyper_jacobian(u, m, x)?.max_abs();
    Ok((factorial(r) as f64).powi(m as i32) * top.powi(r as i32))
}

fn repeated_component(rng: &mut ChaCha8Rng, trial: usize, points: usize) -> Result<Outcome> {
    let (m, r) = law_shape(trial);
    let dim = r + rng.random_range(0..=1);
    let n = r + rng.random_range(0..=1);
    let v = random_field(rng, dim);
    let u = VectorField::separable(vec![v.clone(); n])?;
    let beta = random_index(rng, r, n);
    let alphas: Vec<MultiIndex> = (0..m).map(|_| random_index(rng, r, dim)).collect();
    let spec = MinorSpec::hyper_jacobian(beta, alphas.clone())?;
    let minor = MinorField::new(&u, m, spec.clone())?;
    let scalar = Component::Separable(v);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let x = random_point(rng, dim);
        let got = minor.value(&x)?;
        let expected = if m % 2 == 0 {
            factorial(r) as f64 * scalar_minor_value(&scalar, &alphas, &x)?
        } else {
            0.0
        };
        worst = worst.max((got - expected).abs() / term_scale(&u, m, r, &x)?.max(f64::MIN_POSITIVE));
    }
    Ok(Outcome::measured(
        worst,
        FIELD_LAW_RTOL,
        format!("m = {m}, r = {r}"),
        json!({"field": field_json(&u), "spec": spec_json(&spec), "order": m}),
    ))
}

fn regrouped(rng: &mut ChaCha8Rng, trial: usize, points: usize) -> Result<Outcome> {
    let (m, r) = law_shape(trial);
    let dim = r + rng.random_range(0..=1);
    let u = VectorField::separable((0..r).map(|_| random_field(rng, dim)).collect())?;
    let beta = MultiIndex::leading(r, r)?;
    let alphas: Vec<MultiIndex> = (0..m).map(|_| random_index(rng, r, dim)).collect();
    let spec = MinorSpec::hyper_jacobian(beta, alphas)?;
    let minor = MinorField::new(&u, m, spec.clone())?;
    let eval = JacobianEvaluator::new(&u, m)?;
    let slot = rng.random_range(1..=m);
    let expansion = regrouped_expansion(&u, m, &spec, slot)?;
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let x = random_point(rng, dim);
        let direct = minor.value(&x)?;
        let scale = term_scale(&u, m, r, &x)?.max(f64::MIN_POSITIVE);
        let pointwise = regrouped_value(&eval, &spec, slot, &x)?;
        let symbolic = expansion.eval(&x);
        worst = worst
            .max((direct - pointwise).abs() / scale)
            .max((direct - symbolic).abs() / scale);
    }
    Ok(Outcome::measured(
        worst,
        FIELD_LAW_RTOL,
        format!("m = {m}, r = {r}, regrouped along selector {slot}"),
        json!({"field": field_json(&u), "spec": spec_json(&spec), "order": m, "slot": slot}),
    ))
}

fn ibp_trial(rng: &mut ChaCha8Rng, m: usize, dim: usize) -> Result<Outcome> {
    let domain = BoxDomain::cube(dim, 0.0, PI)?;
    let alpha_choices = enumerate(2, dim)?;
    for _ in 0..10 {
        let u = VectorField::separable((0..2).map(|_| random_field(rng, dim)).collect())?;
        let bend = random_field(rng, dim).scaled(0.3);
        let psi = plateau_field(dim, m + 2).product(&SeparableField::constant(dim, 1.0).add(&bend));
        let alphas: Vec<MultiIndex> = (0..m).map(|_| pick(rng, &alpha_choices).clone()).collect();
        let spec = MinorSpec::hyper_jacobian(MultiIndex::leading(2, 2)?, alphas)?;
        let a = rng.random_range(0.4..0.9);
        let first = ibp_identity_check(&u, &psi, m, &spec, &extension_default(m), &domain)?;
        if first.lhs.abs() < IBP_MIN_LHS {
            continue;
        }
        let second = ibp_identity_check(&u, &psi, m, &spec, &extension_power(m, a)?, &domain)?;
        let swap = (first.rhs - second.rhs).abs() / first.rhs.abs().max(second.rhs.abs());
        let worst = first.relative_error().max(second.relative_error()).max(swap);
        return Ok(Outcome::measured(
            worst,
            IBP_RTOL,
            format!("m = {m}, N = {dim}: lhs {:e}, rhs {:e} / {:e}", first.lhs, first.rhs, second.rhs),
            json!({
                "field": field_json(&u),
                "bend": bend.to_json_value(),
                "spec": spec_json(&spec),
                "order": m,
                "profile_end": a,
            }),
        ));
    }
    Ok(Outcome::exact(false, "no triple with a non-vanishing left side", Value::Null))
}

fn bound_trial(rng: &mut ChaCha8Rng, trial: usize) -> Result<Outcome> {
    let (m, r) = law_shape(trial);
    let n = r + rng.random_range(0..=1);
    let a = random_matrix(rng, vec![n; m + 1]);
    let b = random_matrix(rng, vec![n; m + 1]);
    let selectors = (0..=m).map(|_| random_index(rng, r, n)).collect();
    let spec = MinorSpec::new(selectors)?;
    let (lhs, rhs) = minor_difference_bound(&a, &b, &spec, &DetOptions::default())?;
    Ok(Outcome::exact(
        lhs <= rhs,
        format!("m = {m}, r = {r}: |ΔM| = {lhs}, bound {rhs}"),
        json!({"a": matrix_json(&a), "b": matrix_json(&b), "spec": spec_json(&spec)}),
    ))
}

fn guarded(result: Result<Outcome>) -> Outcome {
    result.unwrap_or_else(|e| Outcome::from_error(e, Value::Null))
}

fn lemma_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let t = cfg.trials;
    vec![
        run_check("layer_swap", "exact", 1, t, cfg, |rng, _| guarded(layer_swap(rng))),
        run_check("transposition", "exact", 2, t, cfg, |rng, _| guarded(transposition(rng))),
        run_check("ordinary_determinant", "exact", 3, t, cfg, |rng, _| guarded(ordinary(rng))),
        run_check("laplace", "exact", 4, t, cfg, |rng, _| guarded(laplace(rng))),
        run_check("layer_fold", "exact", 5, t, cfg, |rng, _| guarded(fold(rng))),
    ]
}

fn field_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let (t, pts) = (cfg.field_trials, cfg.points);
    vec![
        run_check("repeated_component", "double", 6, t, cfg, |rng, i| {
            guarded(repeated_component(rng, i, pts))
        }),
        run_check("regrouped_expansion", "double", 7, t, cfg, |rng, i| {
            guarded(regrouped(rng, i, pts))
        }),
    ]
}

fn ibp_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    cfg.ibp_orders
        .iter()
        .flat_map(|&m| [2usize, 3].map(|dim| (m, dim)))
        .map(|(m, dim)| {
            let id = 8 + (m as u64) * 4 + dim as u64;
            run_check(&format!("ibp_m{m}_n{dim}"), "double", id, cfg.ibp_trials, cfg, |rng, _| {
                guarded(ibp_trial(rng, m, dim))
            })
        })
        .collect()
}

fn bound_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    vec![run_check("difference_bound", "exact", 64, cfg.bound_pairs, cfg, |rng, i| {
        guarded(bound_trial(rng, i))
    })]
}

/// Runs one suite. `lemmas` covers the determinant laws and the two
/// field laws.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> SuiteReport {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Lemmas | Suite::All) {
        checks.extend(lemma_checks(cfg));
        checks.extend(field_checks(cfg));
    }
    if matches!(suite, Suite::Ibp | Suite::All) {
        checks.extend(ibp_checks(cfg));
    }
    if matches!(suite, Suite::Bounds | Suite::All) {
        checks.extend(bound_checks(cfg));
    }
    SuiteReport {
        suite: suite.to_string(),
        seed: cfg.seed,
        checks,
    }
}

/// Only the exact determinant laws, as used for the determinism check.
pub fn run_combinatorial_suite(cfg: &SuiteConfig) -> SuiteReport {
    SuiteReport {
        suite: "combinatorial".into(),
        seed: cfg.seed,
        checks: lemma_checks(cfg),
    }
}

/// Only the two field laws.
pub fn run_field_suite(cfg: &SuiteConfig) -> SuiteReport {
    SuiteReport {
        suite: "fields".into(),
        seed: cfg.seed,
        checks: field_checks(cfg),
    }
}

/// Every check with default sizes.
pub fn run_lemma_suite(seed: u64, trials: usize) -> SuiteReport {
    run_suite(
        Suite::All,
        &SuiteConfig {
            seed,
            trials,
            ..SuiteConfig::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            trials: 20,
            field_trials: 6,
            points: 10,
            ibp_trials: 1,
            bound_pairs: 60,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn small_suite_passes() {
        let report = run_suite(Suite::All, &small());
        for c in &report.checks {
            assert_eq!(c.failed, 0, "{c:?}");
        }
        assert!(report.passed());
    }

    #[test]
    fn workers_do_not_change_the_report() {
        let one = run_combinatorial_suite(&small());
        let four = run_combinatorial_suite(&SuiteConfig {
            workers: Workers::new(4),
            ..small()
        });
        assert_eq!(one.to_json_string().unwrap(), four.to_json_string().unwrap());
    }

    #[test]
    fn failures_carry_inputs() {
        let report = run_check("always_fails", "exact", 99, 7, &small(), |rng, _| {
            let a = random_matrix(rng, vec![2, 2]);
            Outcome::exact(false, "forced", json!({"matrix": matrix_json(&a)}))
        });
        assert_eq!(report.failed, 7);
        assert_eq!(report.failures.len(), RECORDED_FAILURES);
        assert!(report.failures[0].input["matrix"]["entries"].is_array());
    }

    #[test]
    fn suite_names() {
        assert_eq!("ibp".parse::<Suite>().unwrap(), Suite::Ibp);
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Config(_))));
    }
}
