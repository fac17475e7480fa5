use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperjac::calculus::integrate_exact;
use hyperjac::experiments::{separable_family, FamilyConfig, FamilyId};
use hyperjac::{
    sobolev_norm, BoxDomain, DetOptions, GagliardoSpec, HyperMatrix, QuadratureSpec,
    SobolevParams,
};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};

fn entry(index: &[usize]) -> i64 {
    // small, deterministic and far from structured
    index
        .iter()
        .fold(7i64, |acc, &i| (acc * 31 + i as i64 * 17 + 3) % 23)
        - 11
}

fn determinants(c: &mut Criterion) {
    let options = DetOptions::default();
    let mut group = c.benchmark_group("determinant");
    for (n, d) in [(4, 3), (5, 3), (4, 4)] {
        let f64s = HyperMatrix::from_fn(vec![n; d], |i| entry(i) as f64).unwrap();
        let exact = HyperMatrix::from_fn(vec![n; d], |i| {
            BigRational::from_integer(BigInt::from(entry(i)))
        })
        .unwrap();
        let label = format!("n{n}_d{d}");
        group.bench_with_input(BenchmarkId::new("full_f64", &label), &f64s, |b, a| {
            b.iter(|| a.det_full(&options).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fold_f64", &label), &f64s, |b, a| {
            b.iter(|| a.det_layer_fold(&options).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fold_rational", &label), &exact, |b, a| {
            b.iter(|| a.det_layer_fold(&options).unwrap())
        });
    }
    group.finish();
}

fn family_integrals(c: &mut Criterion) {
    let cfg = FamilyConfig::defaults(FamilyId::Prop47);
    let family = separable_family(&cfg).unwrap();
    let domain = BoxDomain::cube(cfg.dim, 0.0, std::f64::consts::PI).unwrap();
    let mut group = c.benchmark_group("integrate_exact");
    for member in &family.members {
        let atoms: Vec<_> = member.atoms.iter().flatten().collect();
        group.bench_with_input(BenchmarkId::new("prop47_atoms", member.k), &atoms, |b, atoms| {
            b.iter(|| {
                atoms
                    .iter()
                    .map(|f| integrate_exact(black_box(f), &domain).unwrap())
                    .sum::<f64>()
            })
        });
    }
    group.finish();
}

fn sobolev(c: &mut Criterion) {
    let mut cfg = FamilyConfig::defaults(FamilyId::Prop45);
    cfg.rho = Some(Rational64::new(3, 4));
    cfg.ks = vec![8];
    let family = separable_family(&cfg).unwrap();
    let u = &family.members[0].field;
    let domain = BoxDomain::cube(2, 0.25 * std::f64::consts::PI, 0.75 * std::f64::consts::PI).unwrap();
    let params = SobolevParams::new(Rational64::new(1, 2), Rational64::from_integer(3)).unwrap();
    let quadrature = QuadratureSpec::default();
    let mut group = c.benchmark_group("gagliardo");
    group.sample_size(10);
    for cells in [16, 32] {
        let pairs = GagliardoSpec::default().with_cells(cells);
        group.bench_with_input(BenchmarkId::new("prop45_k8", cells), &pairs, |b, pairs| {
            b.iter(|| sobolev_norm(u, &params, &domain, &quadrature, pairs).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, determinants, family_integrals, sobolev);
criterion_main!(benches);
