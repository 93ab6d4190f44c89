//! Small dense linear algebra for real symmetric and complex Hermitian
//! positive-definite matrices.
//!
//! Positive definiteness is established by attempting the triangular
//! factorization `X = T T*`; a pivot at or below `1e-12 × max |x_jj|`
//! rejects the matrix. Complex determinants are reported as absolute values.

mod dense;
mod jacobian;
pub mod json;
mod partition;
mod pd;
mod scalar;

use thiserror::Error;

use crate::gammafn::Case;

pub use dense::Matrix;
pub use jacobian::{diagonal_exponent, triangular_jacobian_log};
pub use json::MatrixRecord;
pub use partition::{schur_complement, Partition, Pivot};
pub use pd::{
    cholesky_factor, HpdMatrix, LowerTriangular, LowerTriangularComplex, LowerTriangularReal,
    PdMatrix, SpdMatrix,
};
pub use scalar::Scalar;

/// Relative pivot tolerance of the positive-definiteness check.
pub const PIVOT_REL_TOL: f64 = 1e-12;
/// Relative tolerance on `max |a_ij - conj(a_ji)|` for validated input.
pub const SYMMETRY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix is not square ({rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix has non-finite entries")]
    NotFinite,
    #[error("matrix is not symmetric/Hermitian: relative deviation {deviation:e} > {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("matrix is not positive definite: pivot {index} is {pivot:e} (tolerance {tolerance:e})")]
    NotPositiveDefinite { index: usize, pivot: f64, tolerance: f64 },
    #[error("entry ({row}, {col}) above the diagonal is nonzero")]
    NotLowerTriangular { row: usize, col: usize },
    #[error("diagonal entry {index} must be real and positive, got {value}")]
    NonPositiveDiagonal { index: usize, value: f64 },
    #[error("invalid partition: block size {p1} for dimension {p}")]
    InvalidPartition { p1: usize, p: usize },
    #[error("expected a {expected} matrix, got {got}")]
    CaseMismatch { expected: Case, got: Case },
}

/// Triangular factor of a positive-definite matrix (alias of [`PdMatrix::factor`]).
pub fn cholesky<T: Scalar>(x: &PdMatrix<T>) -> &LowerTriangular<T> {
    x.factor()
}

/// log |X| or log |det X̃|.
pub fn log_det<T: Scalar>(x: &PdMatrix<T>) -> f64 {
    x.log_det()
}
