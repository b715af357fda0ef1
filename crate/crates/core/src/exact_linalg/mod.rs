//! Exact arithmetic over the Gaussian rationals and dense matrix kernels.
//!
//! Every scalar is a complex number with rational real and imaginary parts,
//! stored in lowest terms over arbitrary-precision integers. No operation in
//! this module ever rounds; equality is always exact equality.

mod matrix;
mod scalar;

pub use matrix::DenseMatrix;
pub use scalar::{parse_rational, rational_to_string, GaussianRational, Rational};

use thiserror::Error;

/// Errors from exact scalar and matrix operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("not a permutation of 0..{0}: {1:?}")]
    NotPermutation(usize, Vec<usize>),
    #[error("entry count {got} does not match {rows}x{cols}")]
    BadEntryCount { rows: usize, cols: usize, got: usize },
    #[error("invalid scalar literal {literal:?}: {msg}")]
    BadScalar { literal: String, msg: String },
}
