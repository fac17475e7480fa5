//! Counterexample families, identity suites, rate fitting and reports.

mod config;
mod families;
mod fit;
mod radial;
mod report;
mod suite;

pub use config::{FamilyConfig, FamilyId, FrequencyBase};
pub use families::{
    case3_frequencies, check_lacunarity, family_prop45, family_prop47, family_thm411_case2,
    family_thm411_case3, prop47_frequencies, separable_family, Family, FamilyMember, Lacunarity,
    MAX_EXACT_FREQUENCY,
};
pub use fit::{fit_rate, RateFit, FIT_FLOOR};
pub use radial::{
    ball_minor_integral, family_prop49, radial_coefficient, radial_hessian_identity,
    RadialIdentity, ScaledMember, ScalingFamily, HYPOTHESIS_FLOOR,
};
pub use report::{
    run_family, run_family_with_profile, FamilyReport, FamilyRow, Guard, SplitRow, Verdict,
    GUARD_RTOL, MINOR_SLOPE_TOLERANCE, NORM_SLOPE_SLACK, SPLIT_ROUNDING,
};
pub use suite::{
    run_combinatorial_suite, run_field_suite, run_lemma_suite, run_suite, CheckReport, Failure,
    Suite, SuiteConfig, SuiteReport, FIELD_LAW_RTOL, IBP_RTOL,
};
