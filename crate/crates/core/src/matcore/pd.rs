use num_complex::Complex64;

use super::dense::Matrix;
use super::scalar::Scalar;
use super::{MatrixError, PIVOT_REL_TOL, SYMMETRY_REL_TOL};

/// Lower-triangular factor with strictly positive real diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular<T> {
    data: Matrix<T>,
}

pub type LowerTriangularReal = LowerTriangular<f64>;
pub type LowerTriangularComplex = LowerTriangular<Complex64>;

impl<T: Scalar> LowerTriangular<T> {
    /// Validates shape, a zero strict upper triangle and a real positive diagonal.
    pub fn new(data: Matrix<T>) -> Result<Self, MatrixError> {
        if !data.is_square() {
            return Err(MatrixError::NotSquare { rows: data.rows(), cols: data.cols() });
        }
        let n = data.rows();
        for i in 0..n {
            for j in i + 1..n {
                if data[(i, j)] != T::zero() {
                    return Err(MatrixError::NotLowerTriangular { row: i, col: j });
                }
            }
            let d = data[(i, i)];
            if !(d.re() > 0.0) || d.im() != 0.0 || !d.is_finite() {
                return Err(MatrixError::NonPositiveDiagonal { index: i, value: d.re() });
            }
        }
        Ok(LowerTriangular { data })
    }

    pub(crate) fn new_unchecked(data: Matrix<T>) -> Self {
        LowerTriangular { data }
    }

    pub fn dim(&self) -> usize {
        self.data.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.data
    }

    #[inline]
    pub fn diag(&self, j: usize) -> f64 {
        self.data[(j, j)].re()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[(i, j)]
    }

    /// T T' (real) or T T* (complex).
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| {
            let mut acc = T::zero();
            for k in 0..=i.min(j) {
                acc += self.data[(i, k)] * self.data[(j, k)].conj();
            }
            acc
        })
    }

    /// Σ log t_jj.
    pub fn log_diag_sum(&self) -> f64 {
        (0..self.dim()).map(|j| self.diag(j).ln()).sum()
    }

    /// Solves T x = b in place (forward substitution).
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        for i in 0..n {
            let mut acc = b[i];
            for k in 0..i {
                acc -= self.data[(i, k)] * b[k];
            }
            b[i] = acc.scale(1.0 / self.diag(i));
        }
    }

    /// Solves T* x = b in place (back substitution).
    pub fn solve_adjoint_in_place(&self, b: &mut [T]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        for i in (0..n).rev() {
            let mut acc = b[i];
            for k in i + 1..n {
                acc -= self.data[(k, i)].conj() * b[k];
            }
            b[i] = acc.scale(1.0 / self.diag(i));
        }
    }

    /// T^{-1} B, column by column.
    pub fn solve_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        assert_eq!(b.rows(), self.dim());
        let mut out = Matrix::zeros(b.rows(), b.cols());
        let mut col = vec![T::zero(); b.rows()];
        for j in 0..b.cols() {
            for i in 0..b.rows() {
                col[i] = b[(i, j)];
            }
            self.solve_in_place(&mut col);
            for i in 0..b.rows() {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    /// T^{-1} A T^{-*} for Hermitian `a`, made exactly Hermitian.
    pub fn inverse_congruence(&self, a: &Matrix<T>) -> Matrix<T> {
        let w = self.solve_matrix(a);
        self.solve_matrix(&w.adjoint()).adjoint().hermitian_part()
    }
}

/// Cholesky factorization `A = T T*` of a Hermitian matrix; only the lower
/// triangle of `a` is read.
///
/// Fails with [`MatrixError::NotPositiveDefinite`] when a pivot falls at or
/// below `1e-12 × max |a_jj|`.
pub fn cholesky_factor<T: Scalar>(a: &Matrix<T>) -> Result<LowerTriangular<T>, MatrixError> {
    if !a.is_square() {
        return Err(MatrixError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let max_diag = (0..n).map(|i| a[(i, i)].re().abs()).fold(0.0, f64::max);
    let tolerance = PIVOT_REL_TOL * max_diag;
    let mut l = Matrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re();
        for k in 0..j {
            d -= l[(j, k)].abs_sq();
        }
        if !(d > tolerance) {
            return Err(MatrixError::NotPositiveDefinite { index: j, pivot: d, tolerance });
        }
        let djj = d.sqrt();
        l[(j, j)] = T::from_real(djj);
        for i in j + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc.scale(1.0 / djj);
        }
    }
    Ok(LowerTriangular::new_unchecked(l))
}

/// Real symmetric (`T = f64`) or complex Hermitian (`T = Complex64`)
/// positive-definite matrix, stored together with its triangular factor.
#[derive(Debug, Clone, PartialEq)]
pub struct PdMatrix<T> {
    matrix: Matrix<T>,
    factor: LowerTriangular<T>,
    asymmetry: f64,
}

pub type SpdMatrix = PdMatrix<f64>;
pub type HpdMatrix = PdMatrix<Complex64>;

impl<T: Scalar> PdMatrix<T> {
    /// Validates symmetry (1e-12 relative) and positive definiteness.
    ///
    /// The input is averaged with its conjugate transpose before factoring.
    pub fn new(matrix: Matrix<T>) -> Result<Self, MatrixError> {
        Self::validate(matrix, Some(SYMMETRY_REL_TOL))
    }

    /// Symmetrizes any square input before validating positivity. The
    /// pre-symmetrization deviation is kept in [`PdMatrix::asymmetry`].
    pub fn from_symmetrizing(matrix: Matrix<T>) -> Result<Self, MatrixError> {
        Self::validate(matrix, None)
    }

    fn validate(matrix: Matrix<T>, symmetry_tol: Option<f64>) -> Result<Self, MatrixError> {
        if !matrix.is_square() {
            return Err(MatrixError::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        if matrix.rows() == 0 {
            return Err(MatrixError::Empty);
        }
        if !matrix.is_finite() {
            return Err(MatrixError::NotFinite);
        }
        let asymmetry = matrix.hermitian_deviation();
        if let Some(tol) = symmetry_tol {
            if asymmetry > tol {
                return Err(MatrixError::NotHermitian { deviation: asymmetry, tolerance: tol });
            }
        }
        let matrix = matrix.hermitian_part();
        let factor = cholesky_factor(&matrix)?;
        Ok(PdMatrix { matrix, factor, asymmetry })
    }

    /// Builds `T T*` from a triangular factor.
    pub fn from_factor(factor: LowerTriangular<T>) -> Self {
        let matrix = factor.reconstruct();
        PdMatrix { matrix, factor, asymmetry: 0.0 }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_factor(LowerTriangular::new_unchecked(Matrix::identity(n)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn factor(&self) -> &LowerTriangular<T> {
        &self.factor
    }

    /// Relative deviation from symmetry observed before symmetrization.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    /// log |X| (real) or log |det X̃| (complex): 2 Σ log t_jj.
    pub fn log_det(&self) -> f64 {
        2.0 * self.factor.log_diag_sum()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// X^{-1} b.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.factor.solve_in_place(&mut x);
        self.factor.solve_adjoint_in_place(&mut x);
        x
    }

    /// The form `v X^{-1} v*` for a row vector `v`, evaluated without
    /// forcing a real result.
    pub fn hermitian_form(&self, v: &[T]) -> T {
        let rhs: Vec<T> = v.iter().map(|a| a.conj()).collect();
        let x = self.solve(&rhs);
        v.iter().zip(&x).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// I - X, validated as positive definite.
    pub fn complement(&self) -> Result<Self, MatrixError> {
        let n = self.dim();
        PdMatrix::from_symmetrizing(Matrix::identity(n).sub(&self.matrix))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cholesky_of_identity_is_identity() {
        for n in 1..5 {
            let x = PdMatrix::<f64>::new(Matrix::identity(n)).unwrap();
            assert_eq!(x.factor().matrix(), &Matrix::identity(n));
        }
    }

    #[test]
    fn cholesky_two_by_two() {
        let x = SpdMatrix::new(Matrix::from_rows(&[[4.0, 2.0], [2.0, 5.0]]).unwrap()).unwrap();
        assert_eq!(x.factor().matrix().to_rows(), vec![vec![2.0, 0.0], vec![1.0, 2.0]]);
        assert_abs_diff_eq!(x.log_det(), 16f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn cholesky_hermitian_two_by_two() {
        let c = Complex64::new;
        let a = Matrix::from_rows(&[[c(2.0, 0.0), c(1.0, -1.0)], [c(1.0, 1.0), c(3.0, 0.0)]])
            .unwrap();
        let x = HpdMatrix::new(a.clone()).unwrap();
        let t = x.factor();
        assert_abs_diff_eq!(t.diag(0), 2f64.sqrt(), epsilon = 1e-15);
        let back = t.reconstruct();
        assert!(back.sub(&a).frobenius() <= 1e-12 * a.frobenius());
        // det = 2·3 - |1+i|^2 = 4
        assert_abs_diff_eq!(x.log_det(), 4f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn log_det_diagonal() {
        let x = SpdMatrix::new(Matrix::diagonal(&[2.0, 3.0])).unwrap();
        assert_abs_diff_eq!(x.log_det(), 6f64.ln(), epsilon = 1e-15);
        assert_eq!(SpdMatrix::identity(4).log_det(), 0.0);
    }

    #[test]
    fn indefinite_and_singular_rejected() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(SpdMatrix::new(a), Err(MatrixError::NotPositiveDefinite { index: 1, .. })));
        let s = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(SpdMatrix::new(s), Err(MatrixError::NotPositiveDefinite { .. })));
        let z = Matrix::from_rows(&[[0.0]]).unwrap();
        assert!(SpdMatrix::new(z).is_err());
    }

    #[test]
    fn asymmetry_tolerance() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0 + 1e-14, 2.0]]).unwrap();
        let x = SpdMatrix::new(a).unwrap();
        assert!(x.asymmetry() > 0.0);
        assert_eq!(x.matrix()[(0, 1)], x.matrix()[(1, 0)]);
        let b = Matrix::from_rows(&[[2.0, 1.0], [1.1, 2.0]]).unwrap();
        assert!(matches!(SpdMatrix::new(b.clone()), Err(MatrixError::NotHermitian { .. })));
        let y = SpdMatrix::from_symmetrizing(b).unwrap();
        assert_abs_diff_eq!(y.asymmetry(), 0.05, epsilon = 1e-12);
    }

    #[test]
    fn complex_diagonal_must_be_real() {
        let c = Complex64::new;
        let a = Matrix::from_rows(&[[c(2.0, 0.5), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
            .unwrap();
        assert!(matches!(HpdMatrix::new(a), Err(MatrixError::NotHermitian { .. })));
    }

    #[test]
    fn lower_triangular_validation() {
        let bad = Matrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(LowerTriangular::new(bad).is_err());
        let neg = Matrix::from_rows(&[[1.0, 0.0], [0.3, -1.0]]).unwrap();
        assert!(matches!(
            LowerTriangular::new(neg),
            Err(MatrixError::NonPositiveDiagonal { index: 1, .. })
        ));
    }

    #[test]
    fn inverse_congruence_of_self_is_identity() {
        let a = Matrix::from_rows(&[[4.0, 2.0, 0.4], [2.0, 5.0, 1.0], [0.4, 1.0, 3.0]]).unwrap();
        let x = SpdMatrix::new(a.clone()).unwrap();
        let u = x.factor().inverse_congruence(&a);
        assert!(u.sub(&Matrix::identity(3)).max_abs() < 1e-14);
    }
}
