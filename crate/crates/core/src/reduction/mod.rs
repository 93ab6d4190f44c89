//! Symbolic reduction of matrix-variate gamma and beta integrals.
//!
//! Each elimination step integrates out one diagonal entry (or one diagonal
//! block) together with its off-diagonal row, records the substitutions it
//! used, and multiplies a [`FactorLedger`] of gamma factors with exact
//! half-integer offsets and a rational power of π. The product of all steps,
//! after cancellation, is compared with the expanded closed form.

mod families;
mod ledger;
mod render;
mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use families::{
    closed_form_ledger, reduce, reduce_beta1, reduce_beta2_real, reduce_gamma, reduce_gamma_complex,
    reduce_gamma_real, reduce_gamma_with,
};
pub use ledger::{ledger_to_log_value, FactorLedger, GammaArg, GammaBase, GammaFactor, Side};
pub use render::render_text;
pub use trace::{
    conditions_of, Condition, Eliminated, Family, Move, ReductionStep, ReductionTrace, Residual, Substitution,
};

/// How a gamma integral is split into blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockMethod {
    /// One diagonal entry per step via the Stiefel moves; schedule must be all ones.
    OneAtATime,
    /// Integrate the trailing block's Schur complement, then a Gaussian block.
    Gaussian,
    /// As [`BlockMethod::Gaussian`], pivoting on the trailing block and
    /// eliminating the leading one.
    GaussianMirror,
    /// Split `|X| = |X11||X22||I − YY'|` and integrate over `S = YY'` (real only).
    Stiefel,
}

impl BlockMethod {
    pub fn name(self) -> &'static str {
        match self {
            BlockMethod::OneAtATime => "one_at_a_time",
            BlockMethod::Gaussian => "gaussian",
            BlockMethod::GaussianMirror => "gaussian_mirror",
            BlockMethod::Stiefel => "stiefel",
        }
    }
}

impl std::fmt::Display for BlockMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BlockMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "one_at_a_time" => BlockMethod::OneAtATime,
            "gaussian" => BlockMethod::Gaussian,
            "gaussian_mirror" => BlockMethod::GaussianMirror,
            "stiefel" => BlockMethod::Stiefel,
            other => return Err(format!("unknown block method '{other}'")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("invalid schedule {schedule:?} for p = {p}: {reason}")]
    InvalidSchedule { schedule: Vec<usize>, p: usize, reason: String },
    #[error("dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("method {method} is not available for {family}")]
    UnsupportedMethod { family: Family, method: BlockMethod },
    #[error("this ledger involves β but no β was given")]
    MissingBeta,
    #[error("gamma argument of {factor} is {value}, must be positive")]
    ArgumentDomain { factor: String, value: f64 },
}
