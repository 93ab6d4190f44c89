use std::f64::consts::LN_2;

use super::pd::LowerTriangular;
use super::scalar::Scalar;
use crate::gammafn::Case;

/// Exponent of `t_jj` (0-based `j`) in the Jacobian of `X = T T'` / `X̃ = T̃ T̃*`.
pub fn diagonal_exponent(case: Case, p: usize, j: usize) -> usize {
    match case {
        // t_jj^{p+1-j} for 1-based j
        Case::Real => p - j,
        // t_jj^{2(p-j)+1} for 1-based j
        Case::Complex => 2 * (p - j) - 1,
    }
}

/// log of `dX / dT`:
///
/// - real: `2^p ∏ t_jj^{p+1-j}`
/// - complex: `2^p ∏ t_jj^{2(p-j)+1}`
pub fn triangular_jacobian_log<T: Scalar>(t: &LowerTriangular<T>) -> f64 {
    let p = t.dim();
    let mut acc = p as f64 * LN_2;
    for j in 0..p {
        acc += diagonal_exponent(T::CASE, p, j) as f64 * t.diag(j).ln();
    }
    acc
}
