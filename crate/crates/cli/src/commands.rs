//! Subcommand bodies. Each returns `Ok(false)` when a verification fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use hyperjac::calculus::{ibp_identity_check, sobolev_norm};
use hyperjac::experiments::{run_family, FamilyConfig, FamilyId, FrequencyBase, Suite, SuiteConfig, IBP_RTOL};
use hyperjac::fields::{extension_default, extension_power, plateau_field};
use hyperjac::{
    run_suite, AnyMatrix, BoxDomain, DetOptions, DiagonalCorrection, Error, GagliardoSpec,
    MinorSpec, QuadratureSpec, Result, SeparableField, SobolevParams, VectorField, DEFAULT_BUDGET,
};
use num_rational::Rational64;
use serde_json::json;

use crate::{Common, CounterexampleArgs};

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Budget from `HYPERJAC_BUDGET`, else the library default.
fn budget() -> Result<u128> {
    match std::env::var("HYPERJAC_BUDGET") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("HYPERJAC_BUDGET must be a non-negative integer, got '{text}'"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn options(common: Common) -> Result<DetOptions> {
    Ok(DetOptions::default()
        .with_workers(common.workers())
        .with_budget(budget()?))
}

/// `1,2;1,3` → `[[1,2],[1,3]]`.
fn selectors(text: &str) -> Result<Vec<Vec<usize>>> {
    text.split(';')
        .map(|group| {
            group
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad index '{t}' in selector '{group}'")))
                })
                .collect()
        })
        .collect()
}

fn parse_domain(text: Option<&str>, dim: usize, default: (f64, f64)) -> Result<BoxDomain> {
    let Some(text) = text else {
        return BoxDomain::cube(dim, default.0, default.1);
    };
    let bounds = text
        .split(';')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').collect();
            match parts.as_slice() {
                [lo, hi] => {
                    let parse = |t: &str| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad bound '{t}' in '{pair}'")))
                    };
                    Ok((parse(lo)?, parse(hi)?))
                }
                _ => Err(Error::Parse(format!("expected 'lo,hi', got '{pair}'"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    match bounds.len() {
        1 => BoxDomain::cube(dim, bounds[0].0, bounds[0].1),
        n if n == dim => BoxDomain::new(bounds),
        n => Err(Error::Parse(format!("{n} intervals given for a {dim}-dimensional field"))),
    }
}

fn correction(text: &str) -> Result<DiagonalCorrection> {
    match text {
        "none" => Ok(DiagonalCorrection::None),
        "gradient" => Ok(DiagonalCorrection::Gradient),
        other => Err(Error::Parse(format!("unknown correction '{other}' (none or gradient)"))),
    }
}

pub fn det(path: &Path, fold: bool, common: Common) -> Result<bool> {
    let matrix = AnyMatrix::from_json_str(&read(path)?)?;
    println!("{}", matrix.det_text(&options(common)?, fold)?);
    Ok(true)
}

pub fn minor(path: &Path, select: &str, common: Common) -> Result<bool> {
    let matrix = AnyMatrix::from_json_str(&read(path)?)?;
    let spec = MinorSpec::from_unsorted(selectors(select)?, matrix.orders())?;
    println!("{}", matrix.minor_det_text(&spec, &options(common)?)?);
    Ok(true)
}

pub fn check(
    suite: &str,
    seed: u64,
    trials: usize,
    field_trials: usize,
    order: Option<usize>,
    out: Option<&Path>,
    common: Common,
) -> Result<bool> {
    let suite: Suite = suite.parse()?;
    let mut cfg = SuiteConfig {
        seed,
        trials,
        field_trials,
        workers: common.workers(),
        ..SuiteConfig::default()
    };
    if let Some(m) = order {
        if !(1..=2).contains(&m) {
            return Err(Error::Config(format!("--m must be 1 or 2, got {m}")));
        }
        cfg.ibp_orders = vec![m];
    }
    let report = run_suite(suite, &cfg);
    emit(&report.to_json_string()?, out)?;
    Ok(report.passed())
}

fn parse_base(text: &str) -> Result<FrequencyBase> {
    match text.split_once(':') {
        None if text == "exact" => Ok(FrequencyBase::Exact),
        Some(("reduced", ratio)) => ratio
            .parse()
            .ok()
            .filter(|r| *r >= 2)
            .map(|ratio| FrequencyBase::Reduced { ratio })
            .ok_or_else(|| Error::Parse(format!("bad ratio '{ratio}' (need an integer ≥ 2)"))),
        _ => Err(Error::Parse(format!("unknown base '{text}' (exact or reduced:<ratio>)"))),
    }
}

pub fn counterexample(args: &CounterexampleArgs) -> Result<bool> {
    let family: FamilyId = args.family.parse()?;
    let mut cfg = FamilyConfig::defaults(family);
    // ρ has no default outside the scaling family
    cfg.rho = args.rho;
    if let Some(m) = args.m {
        cfg.order = m;
    }
    if let Some(r) = args.r {
        cfg.degree = r;
    }
    if let Some(n) = args.n {
        cfg.dim = n;
    }
    if let Some(s) = args.s {
        cfg.s = s;
    }
    if let Some(p) = args.p {
        cfg.p = p;
    }
    if let Some(ks) = &args.k {
        cfg.ks = ks.clone();
    }
    if let Some(base) = &args.base {
        cfg.base = parse_base(base)?;
    }
    if let Some(c) = &args.correction {
        cfg.correction = correction(c)?;
    }
    if args.no_norms {
        cfg.norms = false;
    }
    cfg.workers = args.common.workers();
    let report = run_family(&cfg)?;
    let text = match args.format.as_str() {
        "json" => report.to_json_string()?,
        "csv" => report.to_csv_string()?,
        other => return Err(Error::Parse(format!("unknown format '{other}' (json or csv)"))),
    };
    emit(text.trim_end(), args.out.as_deref())?;
    Ok(report.passed())
}

#[allow(clippy::too_many_arguments)]
pub fn sobolev(
    path: &Path,
    s: Rational64,
    p: Rational64,
    domain: Option<&str>,
    grid: usize,
    nodes: usize,
    corr: &str,
    common: Common,
) -> Result<bool> {
    let u = VectorField::from_json_str(&read(path)?)?;
    let domain = parse_domain(domain, u.dim(), (0.0, 1.0))?;
    let params = SobolevParams::new(s, p)?;
    let quadrature = QuadratureSpec::default()
        .with_nodes(nodes)
        .with_workers(common.workers());
    let pairs = GagliardoSpec::default()
        .with_cells(grid)
        .with_correction(correction(corr)?)
        .with_workers(common.workers());
    let norm = sobolev_norm(&u, &params, &domain, &quadrature, &pairs)?;
    let out = json!({
        "norm": norm.total(),
        "integer_part": norm.integer_part,
        "fractional_part": norm.fractional_part,
        "s": s.to_string(),
        "p": p.to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

pub fn ibp_check(
    path: &Path,
    order: usize,
    select: &str,
    psi: Option<&Path>,
    chi: &str,
    domain: Option<&str>,
) -> Result<bool> {
    let u = VectorField::from_json_str(&read(path)?)?;
    let dim = u.dim();
    let mut ambients = vec![u.len()];
    ambients.extend(std::iter::repeat_n(dim, order));
    let spec = MinorSpec::from_unsorted(selectors(select)?, &ambients)?;
    let psi = match psi {
        Some(path) => SeparableField::from_json_str(&read(path)?)?,
        None => plateau_field(dim, order + 2),
    };
    let chi = match chi.split_once(':') {
        None if chi == "default" => extension_default(order),
        Some(("power", a)) => {
            let a: f64 = a.parse().map_err(|_| Error::Parse(format!("bad profile end '{a}'")))?;
            extension_power(order, a).map_err(|e| Error::Config(e.to_string()))?
        }
        _ => return Err(Error::Parse(format!("unknown profile '{chi}' (default or power:a)"))),
    };
    let domain = parse_domain(domain, dim, (0.0, PI))?;
    let check = ibp_identity_check(&u, &psi, order, &spec, &chi, &domain)?;
    // a vanishing minor integral leaves only rounding on both sides
    let scale = check.lhs.abs().max(check.rhs.abs()).max(1.0);
    let error = (check.lhs - check.rhs).abs() / scale;
    let out = json!({
        "lhs": check.lhs,
        "rhs": check.rhs,
        "terms": check.terms,
        "error": error,
        "tolerance": IBP_RTOL,
        "pass": error <= IBP_RTOL,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(error <= IBP_RTOL)
}
