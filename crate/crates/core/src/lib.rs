//! Higher-dimensional determinants, hyper-Jacobian minors and fractional
//! Sobolev rate experiments.

// `!(x > 0.0)` is used on purpose to reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod error;
pub mod experiments;
pub mod fields;
pub mod hypermatrix;
pub mod multiindex;
pub mod parallel;
pub mod scalar;

pub use error::{Error, Result};
pub use hypermatrix::{
    laplace_expand, minor_difference_bound, AnyMatrix, DetOptions, HyperMatrix, MinorSpec,
    ScalarKind, DEFAULT_BUDGET,
};
pub use multiindex::{enumerate, sigma, MultiIndex, Sign, SignedPermutation};
pub use parallel::Workers;
pub use scalar::Scalar;
pub use calculus::{
    integrate_exact, integrate_quadrature, sobolev_norm, BoxDomain, DiagonalCorrection,
    GagliardoSpec, QuadratureSpec, SobolevNorm, SobolevParams,
};
pub use experiments::{
    fit_rate, run_family, run_lemma_suite, run_suite, FamilyConfig, FamilyId, FamilyReport,
    RateFit, Suite, SuiteConfig, SuiteReport,
};
pub use fields::{MinorField, RadialField, SeparableField, Signal, Term, VectorField};
