use thiserror::Error;

use crate::densities::DensityError;
use crate::gammafn::{GammaDomainError, OverflowError};
use crate::matcore::MatrixError;
use crate::reduction::ReductionError;
use crate::verify::VerifyError;

/// Crate-level error, wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] GammaDomainError),
    #[error(transparent)]
    Overflow(#[from] OverflowError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
