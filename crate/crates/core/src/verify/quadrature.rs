//! Nested tanh-sinh quadrature of the p ≤ 2 integrals in the original
//! matrix entries.
//!
//! Each nested rule passes the integrand its distances to both interval ends,
//! computed without cancellation, so determinants that vanish on the boundary
//! of the cone are evaluated as products of those distances. The half line is
//! mapped through `t = x/(λ+x)` with `λ = 2(1+α)`. All dimensions are refined together (step
//! `2^{-level}`) until successive estimates agree to the requested relative
//! tolerance.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::gammafn::{Case, GammaDomainError};

const T_MAX: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Relative change between successive levels that counts as converged.
    pub tolerance: f64,
    pub min_level: u32,
    /// Highest level for integrals of up to three variables.
    pub max_level: u32,
    /// Highest level for four-variable integrals (complex p = 2).
    pub max_level_4d: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { tolerance: 1e-6, min_level: 3, max_level: 7, max_level_4d: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    /// log of the integral.
    pub value: f64,
    pub level: u32,
    /// Relative change from the previous level.
    pub last_change: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    /// Abscissa in (-1, 1).
    x: f64,
    /// 1 − |x|, accurate near the ends.
    comp: f64,
    w: f64,
}

fn nodes(level: u32) -> Vec<Node> {
    let h = (0.5f64).powi(level as i32);
    let n = (T_MAX / h).ceil() as i64;
    let mut out = Vec::with_capacity(2 * n as usize + 1);
    for j in -n..=n {
        let t = j as f64 * h;
        let s = FRAC_PI_2 * t.sinh();
        let comp = 2.0 / ((2.0 * s.abs()).exp() + 1.0);
        let w = h * FRAC_PI_2 * t.cosh() / s.cosh().powi(2);
        if comp > 0.0 && w > 0.0 {
            out.push(Node { x: s.signum() * (1.0 - comp), comp, w });
        }
    }
    out
}

/// A rule at one level, with an evaluation counter.
struct Rule {
    nodes: Vec<Node>,
    evaluations: u64,
}

impl Rule {
    /// ∫ over (a, a + len) of `f(x, x − a, a + len − x)`.
    fn finite(&mut self, a: f64, len: f64, mut f: impl FnMut(&mut Self, f64, f64, f64) -> f64) -> f64 {
        let half = 0.5 * len;
        let mut acc = 0.0;
        for k in 0..self.nodes.len() {
            let nd = self.nodes[k];
            let (da, db) = if nd.x < 0.0 {
                (half * nd.comp, half * (2.0 - nd.comp))
            } else {
                (half * (2.0 - nd.comp), half * nd.comp)
            };
            let x = if nd.x < 0.0 { a + da } else { a + len - db };
            self.evaluations += 1;
            acc += nd.w * f(self, x, da, db);
        }
        acc * half
    }

    /// ∫_0^∞ f(x) dx with `x = λ t/(1−t)`.
    fn half_line(&mut self, scale: f64, mut f: impl FnMut(&mut Self, f64) -> f64) -> f64 {
        self.finite(0.0, 1.0, |r, _, t, one_minus_t| {
            let x = scale * t / one_minus_t;
            f(r, x) * scale / (one_minus_t * one_minus_t)
        })
    }
}

/// Upper bound test for `x^k e^{-x}` style factors: true when the factor is
/// negligible for any polynomial degree up to `degree`.
fn negligible(x: f64, degree: f64) -> bool {
    x > 50.0 && -x + degree * x.ln() < -745.0
}

fn refine(
    config: &QuadratureConfig,
    max_level: u32,
    mut estimate: impl FnMut(&mut Rule) -> f64,
) -> Result<QuadratureEstimate, VerifyError> {
    let mut previous: Option<f64> = None;
    let mut evaluations = 0;
    let mut last_change = f64::INFINITY;
    for level in 1..=max_level {
        let mut rule = Rule { nodes: nodes(level), evaluations: 0 };
        let value = estimate(&mut rule);
        evaluations += rule.evaluations;
        if !(value.is_finite() && value > 0.0) {
            return Err(VerifyError::QuadratureNonConvergence { level, last_change: f64::NAN });
        }
        if let Some(prev) = previous {
            last_change = ((value - prev) / value).abs();
            if level >= config.min_level && last_change < config.tolerance {
                return Ok(QuadratureEstimate { value: value.ln(), level, last_change, evaluations });
            }
        }
        previous = Some(value);
    }
    Err(VerifyError::QuadratureNonConvergence { level: max_level, last_change })
}

/// log ∫_{X>0} |X|^{α-h} e^{-tr X} dX for p ∈ {1, 2}.
pub fn quadrature_gamma(p: usize, alpha: f64, case: Case, config: &QuadratureConfig) -> Result<QuadratureEstimate, VerifyError> {
    check_domain(p, alpha, case)?;
    let h = case.det_shift(p);
    let e = alpha - h;
    let degree = 2.0 * alpha.abs() + 4.0;
    // Puts the bulk of x^{α} e^{-x} near t = 1/2.
    let scale = 2.0 * (1.0 + alpha);
    match (p, case) {
        (1, _) => refine(config, config.max_level, |r| {
            r.half_line(scale, |_, x| if negligible(x, degree) { 0.0 } else { (e * x.ln() - x).exp() })
        }),
        (2, Case::Real) => refine(config, config.max_level, |r| {
            r.half_line(scale, |r, x11| {
                if negligible(x11, degree) {
                    return 0.0;
                }
                r.half_line(scale, |r, x22| {
                    if negligible(x11 + x22, degree) {
                        return 0.0;
                    }
                    let s = (x11 * x22).sqrt();
                    // det = (s − x12)(s + x12)
                    r.finite(-s, 2.0 * s, |_, _, da, db| (e * (da * db).ln()).exp()) * (-x11 - x22).exp()
                })
            })
        }),
        (2, Case::Complex) => refine(config, config.max_level_4d, |r| {
            r.half_line(scale, |r, x11| {
                if negligible(x11, degree) {
                    return 0.0;
                }
                r.half_line(scale, |r, x22| {
                    if negligible(x11 + x22, degree) {
                        return 0.0;
                    }
                    let s = (x11 * x22).sqrt();
                    let inner = r.finite(-s, 2.0 * s, |r, _, da_u, db_u| {
                        // |z|² < x11 x22  ⇔  v² < (s − u)(s + u)
                        let w = (da_u * db_u).sqrt();
                        r.finite(-w, 2.0 * w, |_, _, da, db| (e * (da * db).ln()).exp())
                    });
                    inner * (-x11 - x22).exp()
                })
            })
        }),
        _ => Err(VerifyError::UnsupportedDimension { p, max: 2 }),
    }
}

/// log ∫_{O<X<I} |X|^{α-h} |I-X|^{β-h} dX for p ∈ {1, 2}.
///
/// For p = 2 the diagonal entry `x22` runs over
/// `(|x12|²/x11, 1 − |x12|²/(1 − x11))`.
pub fn quadrature_beta1(
    p: usize,
    alpha: f64,
    beta: f64,
    case: Case,
    config: &QuadratureConfig,
) -> Result<QuadratureEstimate, VerifyError> {
    check_domain(p, alpha, case)?;
    check_domain(p, beta, case)?;
    let h = case.det_shift(p);
    let (ea, eb) = (alpha - h, beta - h);
    match (p, case) {
        (1, _) => refine(config, config.max_level, |r| {
            r.finite(0.0, 1.0, |_, _, x, one_minus_x| (ea * x.ln() + eb * one_minus_x.ln()).exp())
        }),
        (2, Case::Real) => refine(config, config.max_level, |r| {
            r.finite(0.0, 1.0, |r, _, x11, y11| {
                let c = (x11 * y11).sqrt();
                r.finite(-c, 2.0 * c, |r, x12, da, db| {
                    // length of the x22 interval: (c² − x12²)/c²
                    let len = da * db / (c * c);
                    let lo = x12 * x12 / x11;
                    r.finite(lo, len, |_, _, d_lo, d_hi| {
                        // |X| = x11 (x22 − lo), |I−X| = (1 − x11)(hi − x22)
                        (ea * (x11 * d_lo).ln() + eb * (y11 * d_hi).ln()).exp()
                    })
                })
            })
        }),
        (2, Case::Complex) => refine(config, config.max_level_4d, |r| {
            r.finite(0.0, 1.0, |r, _, x11, y11| {
                let c = (x11 * y11).sqrt();
                r.finite(-c, 2.0 * c, |r, u, da_u, db_u| {
                    let w = (da_u * db_u).sqrt();
                    r.finite(-w, 2.0 * w, |r, v, da_v, db_v| {
                        let len = da_v * db_v / (c * c);
                        let lo = (u * u + v * v) / x11;
                        r.finite(lo, len, |_, _, d_lo, d_hi| (ea * (x11 * d_lo).ln() + eb * (y11 * d_hi).ln()).exp())
                    })
                })
            })
        }),
        _ => Err(VerifyError::UnsupportedDimension { p, max: 2 }),
    }
}

// Bound check only; the oracle never evaluates gamma functions.
fn check_domain(p: usize, a: f64, case: Case) -> Result<(), VerifyError> {
    let bound = case.domain_bound(p.max(1));
    if a > bound {
        Ok(())
    } else {
        Err(GammaDomainError { required_bound: bound, actual: a, case, p }.into())
    }
}
