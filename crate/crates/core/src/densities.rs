//! Log-densities of the matrix-variate gamma and beta families.
//!
//! All densities are with respect to Lebesgue measure on the free entries:
//! the `p(p+1)/2` entries on and below the diagonal (real), or the `p` real
//! diagonal entries plus real and imaginary parts below it (complex).
//!
//! Support violations are errors by default. The `*_with(.., checked = false)`
//! variants return `-inf` instead, for rejection-style callers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gammafn::{log_beta_p, log_mvgamma, Case, GammaDomainError};
use crate::matcore::{Matrix, MatrixError, PdMatrix, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("{constraint} is violated: {source}")]
    DomainViolation { constraint: &'static str, source: MatrixError },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Domain(#[from] GammaDomainError),
    #[error("dimension mismatch: parameters are {expected}×{expected}, matrix is {got}×{got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parameters are for the {expected} case, matrix is {got}")]
    CaseMismatch { expected: Case, got: Case },
}

/// `f(X) = |B|^α / Γ_p(α) · |X|^{α-h} e^{-tr(BX)}`.
#[derive(Debug, Clone)]
pub struct MatrixGammaParams<T> {
    pub p: usize,
    pub alpha: f64,
    pub scale_b: PdMatrix<T>,
}

impl<T: Scalar> MatrixGammaParams<T> {
    pub fn new(alpha: f64, scale_b: PdMatrix<T>) -> Result<Self, DensityError> {
        let p = scale_b.dim();
        log_mvgamma(p, alpha, T::CASE)?;
        Ok(MatrixGammaParams { p, alpha, scale_b })
    }

    /// Unit scale `B = I`.
    pub fn standard(p: usize, alpha: f64) -> Result<Self, DensityError> {
        Self::new(alpha, PdMatrix::identity(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaKind {
    /// Support `O < X < I`, kernel `|X|^{α-h} |I-X|^{β-h}`.
    Type1,
    /// Support `X > O`, kernel `|X|^{α-h} |I+X|^{-(α+β)}`.
    Type2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixBetaParams {
    pub p: usize,
    pub alpha: f64,
    pub beta: f64,
    pub kind: BetaKind,
    pub case: Case,
}

impl MatrixBetaParams {
    pub fn new(p: usize, alpha: f64, beta: f64, kind: BetaKind, case: Case) -> Result<Self, DensityError> {
        log_beta_p(p, alpha, beta, case)?;
        Ok(MatrixBetaParams { p, alpha, beta, kind, case })
    }
}

fn check_shape<T: Scalar>(p: usize, case: Case, x: &Matrix<T>) -> Result<(), DensityError> {
    if T::CASE != case {
        return Err(DensityError::CaseMismatch { expected: case, got: T::CASE });
    }
    if !x.is_square() {
        return Err(MatrixError::NotSquare { rows: x.rows(), cols: x.cols() }.into());
    }
    if x.rows() != p {
        return Err(DensityError::DimensionMismatch { expected: p, got: x.rows() });
    }
    Ok(())
}

pub fn log_density_gamma<T: Scalar>(params: &MatrixGammaParams<T>, x: &Matrix<T>) -> Result<f64, DensityError> {
    log_density_gamma_with(params, x, true)
}

pub fn log_density_gamma_with<T: Scalar>(
    params: &MatrixGammaParams<T>,
    x: &Matrix<T>,
    checked: bool,
) -> Result<f64, DensityError> {
    check_shape(params.p, T::CASE, x)?;
    let x = match PdMatrix::new(x.clone()) {
        Ok(x) => x,
        Err(e @ (MatrixError::NotPositiveDefinite { .. } | MatrixError::NotHermitian { .. })) => {
            return if checked { Err(e.into()) } else { Ok(f64::NEG_INFINITY) };
        }
        Err(e) => return Err(e.into()),
    };
    let (p, a) = (params.p, params.alpha);
    let h = T::CASE.det_shift(p);
    let b = &params.scale_b;
    Ok(a * b.log_det() - log_mvgamma(p, a, T::CASE)? + (a - h) * x.log_det()
        - b.matrix().trace_product(x.matrix()))
}

pub fn log_density_beta<T: Scalar>(params: &MatrixBetaParams, x: &Matrix<T>) -> Result<f64, DensityError> {
    log_density_beta_with(params, x, true)
}

pub fn log_density_beta_with<T: Scalar>(
    params: &MatrixBetaParams,
    x: &Matrix<T>,
    checked: bool,
) -> Result<f64, DensityError> {
    check_shape(params.p, params.case, x)?;
    let violation = |constraint, source| {
        if checked {
            Err(DensityError::DomainViolation { constraint, source })
        } else {
            Ok(f64::NEG_INFINITY)
        }
    };
    let xm = match PdMatrix::new(x.clone()) {
        Ok(m) => m,
        Err(e @ MatrixError::NotPositiveDefinite { .. }) => return violation("X > O", e),
        Err(e) => return Err(e.into()),
    };
    let MatrixBetaParams { p, alpha, beta, kind, case } = *params;
    let h = case.det_shift(p);
    let norm = log_beta_p(p, alpha, beta, case)?;
    let kernel = match kind {
        BetaKind::Type1 => {
            let comp = match xm.complement() {
                Ok(c) => c,
                Err(e @ MatrixError::NotPositiveDefinite { .. }) => return violation("I − X > O", e),
                Err(e) => return Err(e.into()),
            };
            (alpha - h) * xm.log_det() + (beta - h) * comp.log_det()
        }
        BetaKind::Type2 => {
            let plus = PdMatrix::from_symmetrizing(Matrix::identity(p).add(xm.matrix()))?;
            (alpha - h) * xm.log_det() - (alpha + beta) * plus.log_det()
        }
    };
    Ok(kernel - norm)
}
