//! Numerical oracles for the closed forms: deterministic quadrature for
//! p ≤ 2 and importance-sampled Monte Carlo for p ≤ 4.
//!
//! Neither oracle evaluates a gamma function of the integral's parameters;
//! the closed form enters only in the final comparison.

mod mc;
mod quadrature;
mod suite;

use thiserror::Error;

use crate::gammafn::GammaDomainError;

pub use mc::{mc_integral, threads_from_env, McEstimate, McRequest, ProposalConfig, MIN_ESS_FRACTION, MIN_SAMPLES, SHARDS};
pub use quadrature::{quadrature_beta1, quadrature_gamma, QuadratureConfig, QuadratureEstimate};
pub use suite::{default_config, run_check, run_suite, CheckSpec, Oracle, SuiteConfig, VerifyReport, MC_SIGMAS, QUAD_REL_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Domain(#[from] GammaDomainError),
    #[error("quadrature did not converge by level {level} (last relative change {last_change:e})")]
    QuadratureNonConvergence { level: u32, last_change: f64 },
    #[error("importance weights are degenerate: effective sample size {ess:.1} of {n}")]
    DegenerateWeights { ess: f64, n: usize },
    #[error("dimension {p} is not supported by this oracle (max {max})")]
    UnsupportedDimension { p: usize, max: usize },
    #[error("family {0} is not supported by this oracle")]
    UnsupportedFamily(String),
    #[error("at least {min} samples are required, got {n}")]
    TooFewSamples { n: usize, min: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}
