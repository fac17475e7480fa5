//! Symbolic fields: poly-trig signals, separable and radial scalar fields,
//! vector fields and their hyper-Jacobian minors.

mod json;
pub mod profiles;
mod radial;
mod separable;
mod signal;
mod vector;

pub use profiles::{
    check_extension_profile, extension_default, extension_power, plateau, plateau_field,
    radial_default,
};
pub use radial::RadialField;
pub use separable::{Product, SeparableField};
pub use signal::{Piece, Signal, Term, Wave};
pub use vector::{
    atom_split, expand_rows, hyper_jacobian, regrouped_expansion, regrouped_value,
    scalar_minor_expand, scalar_minor_value, AtomSplit, Component, JacobianEvaluator, MinorField,
    VectorField,
};
