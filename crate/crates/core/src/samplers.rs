//! Exact samplers for the matrix gamma and beta families.
//!
//! Gamma matrices come from the triangular (Bartlett) construction
//! `X = T T*`: `t_jj² ~ Gamma(α − (j−1)/2, 1)` (real) or
//! `Gamma(α − (j−1), 1)` (complex), and off-diagonal entries with density
//! `e^{-t²}/√π` (real, i.e. `N(0, 1/2)`) or `e^{-|t|²}/π` (complex, real and
//! imaginary parts each `N(0, 1/2)`).
//!
//! Type-1 beta: with `A+B = LL*`, `U = L⁻¹ A L⁻*`. Type-2 beta is the image
//! `V = U (I−U)⁻¹ = L⁻¹ A B⁻¹ L` of a type-1 draw.
//!
//! Every [`Sampler`] owns a ChaCha20 stream fixed by `(seed, stream_id)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::densities::{BetaKind, DensityError, MatrixBetaParams};
use crate::gammafn::{log_mvgamma, GammaDomainError};
use crate::matcore::{LowerTriangular, Matrix, MatrixError, Partition, PdMatrix, Pivot, Scalar};
use crate::stats::{correlation_test, ks_test, normal_cdf, CorrelationResult, KsResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Scalars that can be drawn with density `e^{-|t|²}` up to normalization.
pub trait SampleScalar: Scalar {
    fn gaussian_half<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// Builds a scalar from its real coordinates (one or two of them).
    fn from_coords(c: &[f64]) -> Self;
}

fn normal_half<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    z * std::f64::consts::FRAC_1_SQRT_2
}

impl SampleScalar for f64 {
    fn gaussian_half<R: Rng + ?Sized>(rng: &mut R) -> Self {
        normal_half(rng)
    }
    fn from_coords(c: &[f64]) -> Self {
        c[0]
    }
}

impl SampleScalar for Complex64 {
    fn gaussian_half<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re = normal_half(rng);
        Complex64::new(re, normal_half(rng))
    }
    fn from_coords(c: &[f64]) -> Self {
        Complex64::new(c[0], c[1])
    }
}

/// A single-threaded sampler bound to one RNG stream.
#[derive(Debug, Clone)]
pub struct Sampler {
    stream: RngStream,
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn new(stream: RngStream) -> Self {
        Sampler { stream, rng: stream.rng() }
    }

    pub fn from_seed(seed: u64, stream_id: u64) -> Self {
        Self::new(RngStream::new(seed, stream_id))
    }

    pub fn stream(&self) -> RngStream {
        self.stream
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    /// Triangular factor `T` of a gamma draw `X = T T*`.
    pub fn bartlett_factor<T: SampleScalar>(&mut self, p: usize, alpha: f64) -> Result<LowerTriangular<T>, GammaDomainError> {
        log_mvgamma(p, alpha, T::CASE)?;
        let step = T::CASE.offset_step().to_f64();
        let mut t = Matrix::<T>::zeros(p, p);
        for j in 0..p {
            let shape = alpha - step * j as f64;
            let g = Gamma::new(shape, 1.0).expect("shape is positive inside the domain");
            t[(j, j)] = T::from_real(g.sample(&mut self.rng).sqrt());
            for i in j + 1..p {
                t[(i, j)] = T::gaussian_half(&mut self.rng);
            }
        }
        Ok(LowerTriangular::new_unchecked(t))
    }

    pub fn gamma_matrix<T: SampleScalar>(&mut self, p: usize, alpha: f64) -> Result<PdMatrix<T>, GammaDomainError> {
        Ok(PdMatrix::from_factor(self.bartlett_factor(p, alpha)?))
    }

    pub fn beta_matrix<T: SampleScalar>(&mut self, params: &MatrixBetaParams) -> Result<PdMatrix<T>, DensityError> {
        if params.case != T::CASE {
            return Err(DensityError::CaseMismatch { expected: params.case, got: T::CASE });
        }
        let a = self.gamma_matrix::<T>(params.p, params.alpha)?;
        let b = self.gamma_matrix::<T>(params.p, params.beta)?;
        let l = crate::matcore::cholesky_factor(&a.matrix().add(b.matrix()))?;
        let out = match params.kind {
            BetaKind::Type1 => l.inverse_congruence(a.matrix()),
            BetaKind::Type2 => {
                // L⁻¹ A · B⁻¹ L
                let left = l.solve_matrix(a.matrix());
                let bf = b.factor();
                let right = solve_upper(bf, &bf.solve_matrix(l.matrix()));
                left.matmul(&right).hermitian_part()
            }
        };
        Ok(PdMatrix::from_symmetrizing(out)?)
    }
}

/// `T^{-*} M`, column by column.
fn solve_upper<T: Scalar>(t: &LowerTriangular<T>, m: &Matrix<T>) -> Matrix<T> {
    let mut out = m.clone();
    let mut col = vec![T::zero(); m.rows()];
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            col[i] = m[(i, j)];
        }
        t.solve_adjoint_in_place(&mut col);
        for i in 0..m.rows() {
            out[(i, j)] = col[i];
        }
    }
    out
}

pub fn sample_gamma_matrix<T: SampleScalar>(
    p: usize,
    alpha: f64,
    sampler: &mut Sampler,
) -> Result<PdMatrix<T>, GammaDomainError> {
    sampler.gamma_matrix(p, alpha)
}

pub fn sample_beta_matrix<T: SampleScalar>(
    params: &MatrixBetaParams,
    sampler: &mut Sampler,
) -> Result<PdMatrix<T>, DensityError> {
    sampler.beta_matrix(params)
}

/// KS result for one entry of `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryTest {
    pub row: usize,
    pub col: usize,
    pub ks: KsResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCheckReport {
    pub p1: usize,
    pub p2: usize,
    pub alpha: f64,
    pub n_draws: usize,
    pub stream: RngStream,
    /// Entries of `Y = X21 X11^{-1/2}` against `N(0, 1/2)`.
    pub entry_tests: Vec<EntryTest>,
    /// log|X11| against log|X22 − X21 X11⁻¹ X12|.
    pub log_det_correlation: CorrelationResult,
    /// tr X11 against tr(X22 − X21 X11⁻¹ X12).
    pub trace_correlation: CorrelationResult,
    pub pass: bool,
}

/// Checks the block structure of real gamma draws: `Y = X21 X11^{-1/2}` has
/// iid `N(0, 1/2)` entries, and `X11` is independent of the Schur complement.
///
/// The root of `X11` is its triangular factor `L11`, so `Y = X21 L11^{-T}`;
/// any root with `R R' = X11` gives the same law for `Y`.
pub fn conditional_block_gaussian_check(
    p1: usize,
    p2: usize,
    alpha: f64,
    n_draws: usize,
    sampler: &mut Sampler,
) -> Result<BlockCheckReport, crate::Error> {
    let p = p1 + p2;
    if p1 == 0 || p2 == 0 {
        return Err(MatrixError::InvalidPartition { p1, p }.into());
    }
    if n_draws < 2 {
        return Err(crate::Error::InvalidArgument("need at least 2 draws".into()));
    }
    log_mvgamma(p, alpha, crate::Case::Real)?;
    let mut entries = vec![Vec::with_capacity(n_draws); p1 * p2];
    let (mut ld11, mut ld_s, mut tr11, mut tr_s) = (vec![], vec![], vec![], vec![]);
    for _ in 0..n_draws {
        let x = sampler.gamma_matrix::<f64>(p, alpha)?;
        let part = Partition::new(&x, p1)?;
        // (L11⁻¹ X12)' = X21 L11^{-T}, p2 × p1
        let y = part.x11.factor().solve_matrix(&part.x12).adjoint();
        for i in 0..p2 {
            for j in 0..p1 {
                entries[i * p1 + j].push(y[(i, j)]);
            }
        }
        let s = part.schur_complement(Pivot::OnX11)?;
        ld11.push(part.x11.log_det());
        ld_s.push(s.log_det());
        tr11.push(part.x11.trace());
        tr_s.push(s.trace());
    }
    let cdf = normal_cdf(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let entry_tests: Vec<EntryTest> = entries
        .iter()
        .enumerate()
        .map(|(k, xs)| EntryTest { row: k / p1, col: k % p1, ks: ks_test(xs, &cdf) })
        .collect();
    let log_det_correlation = correlation_test(&ld11, &ld_s);
    let trace_correlation = correlation_test(&tr11, &tr_s);
    let pass = entry_tests.iter().all(|e| e.ks.pass) && log_det_correlation.pass && trace_correlation.pass;
    Ok(BlockCheckReport {
        p1,
        p2,
        alpha,
        n_draws,
        stream: sampler.stream(),
        entry_tests,
        log_det_correlation,
        trace_correlation,
        pass,
    })
}
