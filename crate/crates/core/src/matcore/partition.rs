use serde::{Deserialize, Serialize};

use super::dense::Matrix;
use super::pd::PdMatrix;
use super::scalar::Scalar;
use super::MatrixError;

/// Which diagonal block serves as the pivot of a Schur complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pivot {
    /// X22 - X21 X11^{-1} X12
    OnX11,
    /// X11 - X12 X22^{-1} X21
    OnX22,
}

/// A 2×2 block view of a positive-definite matrix, with X11 of size p1.
#[derive(Debug, Clone)]
pub struct Partition<T> {
    pub p1: usize,
    pub p2: usize,
    pub x11: PdMatrix<T>,
    pub x12: Matrix<T>,
    pub x21: Matrix<T>,
    pub x22: PdMatrix<T>,
}

impl<T: Scalar> Partition<T> {
    pub fn new(x: &PdMatrix<T>, p1: usize) -> Result<Self, MatrixError> {
        let p = x.dim();
        if p1 == 0 || p1 >= p {
            return Err(MatrixError::InvalidPartition { p1, p });
        }
        let p2 = p - p1;
        let m = x.matrix();
        let x12 = m.block(0, p1, p1, p2);
        Ok(Partition {
            p1,
            p2,
            x11: PdMatrix::new(m.block(0, 0, p1, p1))?,
            x21: x12.adjoint(),
            x12,
            x22: PdMatrix::new(m.block(p1, p1, p2, p2))?,
        })
    }

    /// Schur complement of the chosen pivot block.
    pub fn schur_complement(&self, pivot: Pivot) -> Result<PdMatrix<T>, MatrixError> {
        let (pivot_block, other, off) = match pivot {
            Pivot::OnX11 => (&self.x11, &self.x22, &self.x12),
            Pivot::OnX22 => (&self.x22, &self.x11, &self.x21),
        };
        // other - off* P^{-1} off = other - Z* Z with Z = L^{-1} off
        let z = pivot_block.factor().solve_matrix(off);
        PdMatrix::from_symmetrizing(other.matrix().sub(&z.adjoint().matmul(&z)))
    }
}

/// Free function form of [`Partition::schur_complement`].
pub fn schur_complement<T: Scalar>(
    part: &Partition<T>,
    pivot: Pivot,
) -> Result<PdMatrix<T>, MatrixError> {
    part.schur_complement(pivot)
}
