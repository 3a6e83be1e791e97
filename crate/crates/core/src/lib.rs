//! Connectivity and separation of level sets of quadratic functions.
//!
//! A quadratic is `f(x) = xᵀAx + 2aᵀx + a₀` on ℝⁿ. This crate counts the
//! connected components of `{f<0}`, `{f≤0}` and `{f=0}`, and decides whether
//! the zero set of another quadratic `g` separates `{f=0}`: whether `{f=0}`
//! splits into two nonempty parts on which `g` has strictly opposite signs.
//! Positive answers carry a certificate and a pair of witness points.

pub mod connectivity;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod quadratic;
pub mod separation;

pub use connectivity::{
    components, components_level, components_strict_sublevel, components_sublevel,
    ComponentReport, Tag, Target, Witness,
};
pub use error::{Error, Result};
pub use linalg::{
    definiteness, eig_sym, inertia, nullspace_basis_of_covector, pinv_sym, range_contains,
    Definiteness, EigenDecomposition, InertiaReport, Matrix, SymMatrix, Tolerances,
};
pub use oracle::{
    grid_components_2d, grid_separation_2d, oracle_separates, sample_level_set, GridSpec,
    OracleReport,
};
pub use quadratic::{
    canonical_form, critical_value, linear_combination, multiple_of, AffineChange,
    AffineFunction, CanonicalForm, FormId, QuadraticFunction,
};
pub use separation::{
    check_mutual, combined_separation, separates_affine_level, separates_level,
    AffineSeparationCertificate, Branch, FailureReason, MutualVerdict, Reverse, SeparationVerdict,
};
