//! Matrix-variate gamma and beta integrals in the real and complex cases.
//!
//! The crate is organised around the integrals
//!
//! ```text
//! Γ_p(α)   = ∫_{X>O} |X|^{α-(p+1)/2} e^{-tr X} dX
//! Γ̃_p(α)   = ∫_{X̃>O} |det X̃|^{α-p} e^{-tr X̃} dX̃
//! B_p(α,β) = ∫_{O<X<I} |X|^{α-(p+1)/2} |I-X|^{β-(p+1)/2} dX
//! ```
//!
//! and provides:
//!
//! - [`gammafn`]: closed-form log-scale multivariate gamma and beta functions.
//! - [`matcore`]: validated positive-definite matrices, triangular factors,
//!   Schur complements and the Jacobians of `X = TT'`.
//! - [`reduction`]: exact symbolic replays of the partitioned-matrix
//!   evaluations, as factor ledgers that normalise to the closed forms.
//! - [`densities`]: log-densities of the matrix gamma and type-1/type-2 beta
//!   families.
//! - [`samplers`]: Bartlett-type samplers with reproducible RNG streams.
//! - [`verify`]: quadrature and importance-sampling oracles.

pub mod densities;
pub mod error;
pub mod gammafn;
pub mod matcore;
pub mod reduction;
pub mod samplers;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use gammafn::{Case, GammaDomainError};
