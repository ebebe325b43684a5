//! Exact calculus of multiplier ideals, adjoint ideals, log canonical
//! thresholds and jumping numbers for monomial ideals and toric
//! plurisubharmonic weights.
//!
//! Everything that decides membership runs in exact rational arithmetic on
//! top of [`lp`]. The [`oracle`] module is the only floating-point code and
//! exists to cross-check the exact verdicts against the integrals they
//! characterize.

pub mod error;
pub mod ideal;
pub mod lp;
pub mod newton;
pub mod oracle;
pub mod toric;

pub use error::{Error, Result};
pub use lp::Rational;
