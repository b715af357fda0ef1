//! Exact solver for the matrix equation `X^T A X = B` with a skew-symmetric
//! right-hand side, over the Gaussian rationals.
//!
//! The matrix A is described by its canonical form for congruence (a direct
//! sum of canonical blocks, see [`cfc_model`]); B is either given as
//! `H_2(-1)^{\oplus m}` through the rank parameter m or as an explicit exact
//! skew-symmetric matrix. The solver decides consistency through the
//! quarter-integer invariant rho and the block obstructions, and for
//! consistent queries it builds an explicit solution together with a
//! certificate chain of verified relations ([`planner`]); every certificate
//! step carries a witness matrix that is re-checked by exact multiplication,
//! so a reported solution can never be wrong silently.
//!
//! With the default `parallel` feature, certificate steps verify in parallel
//! through rayon; disabling it falls back to the identical sequential path.

pub mod cfc_model;
pub mod exact_linalg;
pub mod planner;
pub mod rule_catalog;
pub mod skew_canon;

pub use cfc_model::{parse_spec, Block, BlockCensus, BlockKind, CfcSpec, RhoValue, SkewTarget};
pub use exact_linalg::{DenseMatrix, GaussianRational, Rational};
pub use planner::{
    decide, max_skew_rank, solve, solve_general, verify_matrices, verify_spec, Certificate,
    MaxSkewRank, PlanError, Reason, Verdict, VerdictKind,
};
pub use rule_catalog::{Rule, RuleError};
pub use skew_canon::{is_skew, skew_canonicalize, SkewReduction};
