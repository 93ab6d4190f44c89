//! Importance-sampled Monte Carlo in triangular coordinates `X = T T*`.
//!
//! Gamma family: `t_jj² ~ Gamma(a_j + shape_shift, 1)` with `a_j` the shape
//! implied by the integrand, and off-diagonal coordinates `N(0, σ²)` with
//! `σ² = ½ · offdiag_inflation`.
//!
//! Type-1 beta family: row `k` of `T` is `(t, d)`. The constraint `X < I`
//! confines `t` to the ellipsoid `t Q t* < 1` with `Q = (I − M*M)⁻¹`, `M`
//! the leading block of `T`, and then `d² < 1 − t Q t*`. With `Q⁻¹ = L L*`
//! and `t = y L*`, `y` lies in the unit ball; it is drawn with density
//! `∝ (1 − |y|²)^γ` and `d² = (1 − |y|²) b`, `b ~ Beta`. Proposal parameters
//! follow the integrand's row-wise exponents, scaled by `beta_shrink`.
//!
//! Weights are evaluated on `X` itself (`tr X`, and a fresh factorization of
//! `I − X`; `|X|` is the product of the `t_jj²`) times the Jacobian `dX/dT`, divided by the proposal
//! density. The sample is split into a fixed plan of shards, each with its own
//! RNG stream, so results do not depend on the number of worker threads.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::VerifyError;
use crate::gammafn::{Case, GammaDomainError};
use crate::matcore::{cholesky_factor, triangular_jacobian_log, LowerTriangular, Matrix};
use crate::reduction::Family;
use crate::samplers::{RngStream, SampleScalar};

/// Number of shards; shard `i` draws from stream `i`.
pub const SHARDS: usize = 16;
pub const MIN_SAMPLES: usize = 10_000;
/// Effective sample size below this fraction of `n` is rejected.
pub const MIN_ESS_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProposalConfig {
    pub shape_shift: f64,
    pub offdiag_inflation: f64,
    pub beta_shrink: f64,
}

impl Default for ProposalConfig {
    fn default() -> Self {
        ProposalConfig { shape_shift: 0.5, offdiag_inflation: 1.5, beta_shrink: 0.85 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// log of the integral.
    pub value: f64,
    /// Delta-method standard error of `value`.
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub effective_sample_size: f64,
}

/// Worker threads: `MATVAR_THREADS` when set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("MATVAR_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

fn shard_sizes(n: usize) -> Vec<usize> {
    (0..SHARDS).map(|i| n / SHARDS + usize::from(i < n % SHARDS)).collect()
}

#[derive(Debug, Clone, Copy)]
struct Shard {
    max: f64,
    s1: f64,
    s2: f64,
}

fn summarize(lw: &[f64]) -> Shard {
    let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Shard { max, s1: 0.0, s2: 0.0 };
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for &x in lw {
        let e = (x - max).exp();
        s1 += e;
        s2 += e * e;
    }
    Shard { max, s1, s2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McRequest {
    pub family: Family,
    pub p: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub n: usize,
    pub seed: u64,
}

/// log ∫ of the family's kernel by importance sampling. `threads` falls
/// back to `MATVAR_THREADS`, then to rayon's default.
pub fn mc_integral(
    req: &McRequest,
    proposal: &ProposalConfig,
    threads: Option<usize>,
) -> Result<McEstimate, VerifyError> {
    let McRequest { family, p, alpha, beta, n, seed } = *req;
    if n < MIN_SAMPLES {
        return Err(VerifyError::TooFewSamples { n, min: MIN_SAMPLES });
    }
    if !(1..=4).contains(&p) {
        return Err(VerifyError::UnsupportedDimension { p, max: 4 });
    }
    let case = family.case();
    check_domain(p, alpha, case)?;
    let kernel = match family {
        Family::GammaReal | Family::GammaComplex => Kernel::Gamma,
        Family::Beta1Real | Family::Beta1Complex => {
            let b = beta.ok_or_else(|| VerifyError::Config("beta is required for beta families".into()))?;
            check_domain(p, b, case)?;
            Kernel::Beta1(b)
        }
        Family::Beta2Real => return Err(VerifyError::UnsupportedFamily(family.to_string())),
    };
    let job = Job { p, alpha, kernel, proposal: *proposal };
    let run = |i: usize, size: usize| -> Shard {
        let mut rng = RngStream::new(seed, i as u64).rng();
        let lw: Vec<f64> = match case {
            Case::Real => (0..size).map(|_| job.log_weight::<f64, _>(&mut rng)).collect(),
            Case::Complex => (0..size).map(|_| job.log_weight::<Complex64, _>(&mut rng)).collect(),
        };
        summarize(&lw)
    };
    let plan: Vec<(usize, usize)> = shard_sizes(n).into_iter().enumerate().collect();
    let shards: Vec<Shard> = match threads.or_else(threads_from_env) {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| VerifyError::Config(e.to_string()))?
            .install(|| plan.par_iter().map(|&(i, s)| run(i, s)).collect()),
        None => plan.par_iter().map(|&(i, s)| run(i, s)).collect(),
    };
    merge(&shards, n, seed)
}

fn merge(shards: &[Shard], n: usize, seed: u64) -> Result<McEstimate, VerifyError> {
    let max = shards.iter().map(|s| s.max).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(VerifyError::DegenerateWeights { ess: 0.0, n });
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for s in shards.iter().filter(|s| s.max > f64::NEG_INFINITY) {
        let f = (s.max - max).exp();
        s1 += s.s1 * f;
        s2 += s.s2 * f * f;
    }
    let nf = n as f64;
    let ess = s1 * s1 / s2;
    if ess < MIN_ESS_FRACTION * nf {
        return Err(VerifyError::DegenerateWeights { ess, n });
    }
    let mean = s1 / nf;
    let var = (s2 - s1 * s1 / nf) / (nf - 1.0);
    let std_error = (var.max(0.0) / nf).sqrt() / mean;
    Ok(McEstimate { value: max + mean.ln(), std_error, n_samples: n, seed, effective_sample_size: ess })
}

fn check_domain(p: usize, a: f64, case: Case) -> Result<(), VerifyError> {
    let bound = case.domain_bound(p);
    if a > bound {
        Ok(())
    } else {
        Err(GammaDomainError { required_bound: bound, actual: a, case, p }.into())
    }
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    Gamma,
    Beta1(f64),
}

#[derive(Debug, Clone, Copy)]
struct Job {
    p: usize,
    alpha: f64,
    kernel: Kernel,
    proposal: ProposalConfig,
}

fn ln_beta_fn(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Draws `count` real coordinates into `out` from `N(0, var)`, returning the log density.
fn normal_coords<R: Rng>(rng: &mut R, var: f64, out: &mut [f64]) -> f64 {
    let d = Normal::new(0.0, var.sqrt()).expect("positive variance");
    let mut lq = 0.0;
    for z in out.iter_mut() {
        *z = d.sample(rng);
        lq += -*z * *z / (2.0 * var) - 0.5 * (2.0 * PI * var).ln();
    }
    lq
}

impl Job {
    fn log_weight<T: SampleScalar, R: Rng>(&self, rng: &mut R) -> f64 {
        let (t, log_q) = match self.kernel {
            Kernel::Gamma => self.gamma_proposal::<T, R>(rng),
            Kernel::Beta1(b) => self.beta_proposal::<T, R>(rng, b),
        };
        let case = T::CASE;
        let h = case.det_shift(self.p);
        let x = t.reconstruct();
        let log_j = triangular_jacobian_log(&t);
        // |X| = ∏ t_jj² exactly; refactorizing X loses draws with tiny t_jj.
        let log_det_x = 2.0 * t.log_diag_sum();
        let log_f = match self.kernel {
            Kernel::Gamma => (self.alpha - h) * log_det_x - x.trace(),
            Kernel::Beta1(beta) => {
                let Ok(f) = cholesky_factor(&Matrix::<T>::identity(self.p).sub(&x)) else {
                    return f64::NEG_INFINITY;
                };
                (self.alpha - h) * log_det_x + (beta - h) * 2.0 * f.log_diag_sum()
            }
        };
        log_f + log_j - log_q
    }

    fn gamma_proposal<T: SampleScalar, R: Rng>(&self, rng: &mut R) -> (LowerTriangular<T>, f64) {
        let p = self.p;
        let step = T::CASE.offset_step().to_f64();
        let rd = T::CASE.real_dim();
        let var = 0.5 * self.proposal.offdiag_inflation;
        let mut t = Matrix::<T>::zeros(p, p);
        let mut log_q = 0.0;
        let mut coords = [0.0; 2];
        for j in 0..p {
            let shape = self.alpha - step * j as f64 + self.proposal.shape_shift;
            let s: f64 = Gamma::new(shape, 1.0).expect("positive shape").sample(rng);
            let d = s.sqrt();
            // density of d = √s: f_s(s) · 2d
            log_q += (shape - 1.0) * s.ln() - s - ln_gamma(shape) + LN_2 + d.ln();
            t[(j, j)] = T::from_real(d);
            for i in j + 1..p {
                log_q += normal_coords(rng, var, &mut coords[..rd]);
                t[(i, j)] = T::from_coords(&coords[..rd]);
            }
        }
        (LowerTriangular::new_unchecked(t), log_q)
    }

    fn beta_proposal<T: SampleScalar, R: Rng>(&self, rng: &mut R, beta: f64) -> (LowerTriangular<T>, f64) {
        let p = self.p;
        let step = T::CASE.offset_step().to_f64();
        let rd = T::CASE.real_dim();
        let shrink = self.proposal.beta_shrink;
        let mut t = Matrix::<T>::zeros(p, p);
        let mut log_q = 0.0;
        let mut dir = vec![0.0; rd * p];
        for k in 0..p {
            let a = self.alpha - step * k as f64;
            let c = beta - step * k as f64;
            let mut room = 1.0;
            if k > 0 {
                // A = I − M*M with M the leading k×k block
                let m = t.block(0, 0, k, k);
                let a_mat = Matrix::<T>::identity(k).sub(&m.adjoint().matmul(&m)).hermitian_part();
                let Ok(l) = cholesky_factor(&a_mat) else {
                    return (LowerTriangular::new_unchecked(t), f64::INFINITY);
                };
                let dim = (rd * k) as f64;
                let gamma = shrink * (a + c) - 1.0;
                let r2: f64 = Beta::new(dim / 2.0, gamma + 1.0).expect("positive").sample(rng);
                let dir = &mut dir[..rd * k];
                let mut norm = 0.0;
                for z in dir.iter_mut() {
                    *z = rng.sample(StandardNormal);
                    norm += *z * *z;
                }
                let scale = (r2 / norm).sqrt();
                let y: Vec<T> = dir.chunks(rd).map(|ch| T::from_coords(ch).scale(scale)).collect();
                // t = y L*, so t_j = Σ_{i ≤ j} y_i conj(L_ji)
                for j in 0..k {
                    let mut acc = T::zero();
                    for i in 0..=j {
                        acc += y[i] * l.get(j, i).conj();
                    }
                    t[(k, j)] = acc;
                }
                room = 1.0 - r2;
                log_q += ln_gamma(dim / 2.0 + gamma + 1.0) - (dim / 2.0) * PI.ln() - ln_gamma(gamma + 1.0)
                    + gamma * room.ln()
                    - rd as f64 * l.log_diag_sum();
            }
            let (ba, bc) = (shrink * a, shrink * c);
            let b: f64 = Beta::new(ba, bc).expect("positive").sample(rng);
            let d = (room * b).sqrt();
            // density of d: f_b(d²/room) · 2d/room
            log_q += (ba - 1.0) * b.ln() + (bc - 1.0) * (1.0 - b).ln() - ln_beta_fn(ba, bc) + LN_2 + d.ln() - room.ln();
            t[(k, k)] = T::from_real(d);
        }
        (LowerTriangular::new_unchecked(t), log_q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gammafn::{log_beta_p, log_mvgamma};

    fn est(family: Family, p: usize, a: f64, b: Option<f64>, n: usize, seed: u64) -> McEstimate {
        let req = McRequest { family, p, alpha: a, beta: b, n, seed };
        mc_integral(&req, &ProposalConfig::default(), None).unwrap()
    }

    #[test]
    fn shard_plan_covers_n() {
        let s = shard_sizes(100_003);
        assert_eq!(s.len(), SHARDS);
        assert_eq!(s.iter().sum::<usize>(), 100_003);
    }

    #[test]
    fn gamma_scalar() {
        let e = est(Family::GammaReal, 1, 2.5, None, 20_000, 1);
        assert!((e.value - ln_gamma(2.5)).abs() < 4.0 * e.std_error, "{e:?}");
        let e = est(Family::GammaComplex, 1, 2.5, None, 20_000, 1);
        assert!((e.value - ln_gamma(2.5)).abs() < 4.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn gamma_p2_both_cases() {
        let e = est(Family::GammaReal, 2, 3.0, None, 40_000, 2);
        let exact = log_mvgamma(2, 3.0, Case::Real).unwrap();
        assert!((e.value - exact).abs() < 4.0 * e.std_error, "{e:?} vs {exact}");
        let e = est(Family::GammaComplex, 2, 3.0, None, 40_000, 2);
        let exact = (2.0 * PI).ln();
        assert!((e.value - exact).abs() < 4.0 * e.std_error, "{e:?} vs {exact}");
    }

    #[test]
    fn beta1_p2_both_cases() {
        for case in [Case::Real, Case::Complex] {
            let fam = if case == Case::Real { Family::Beta1Real } else { Family::Beta1Complex };
            let e = est(fam, 2, 3.0, Some(2.5), 40_000, 3);
            let exact = log_beta_p(2, 3.0, 2.5, case).unwrap();
            assert!((e.value - exact).abs() < 4.0 * e.std_error, "{case}: {e:?} vs {exact}");
        }
    }

    #[test]
    fn independent_of_thread_count() {
        let cfg = ProposalConfig::default();
        let req = McRequest { family: Family::GammaReal, p: 3, alpha: 3.0, beta: None, n: 16_000, seed: 9 };
        let a = mc_integral(&req, &cfg, Some(1)).unwrap();
        let b = mc_integral(&req, &cfg, Some(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = ProposalConfig::default();
        let req = McRequest { family: Family::GammaReal, p: 3, alpha: 3.0, beta: None, n: 100, seed: 1 };
        assert!(matches!(mc_integral(&req, &cfg, None), Err(VerifyError::TooFewSamples { .. })));
        let req = McRequest { alpha: 1.0, n: 20_000, ..req };
        assert!(matches!(mc_integral(&req, &cfg, None), Err(VerifyError::Domain(_))));
        let req = McRequest { family: Family::Beta1Real, p: 2, alpha: 3.0, ..req };
        assert!(mc_integral(&req, &cfg, None).is_err());
    }
}
