//! # lcext
//!
//! Computable core of an L² extension theorem with lc-measure estimates,
//! realised on a single polydisc chart carrying simple-normal-crossing
//! (diagonal) weights
//!
//! ```text
//!   φ_L = Σ ℓ_j log|z_j|² + β,      ψ = Σ ν_j log|z_j|² + α,     ν_j ≥ 0, α ≤ 0.
//! ```
//!
//! The crate is organised by concern:
//!
//! | module | content |
//! |--------|---------|
//! | [`snc_model`] | exact-rational chart data, monomial sections, validation |
//! | [`multiplier`] | multiplier ideals, jumping numbers, lc strata, σ_f |
//! | [`lcv`] | the lc-measure as an ε-limit, its closed form, trichotomy |
//! | [`weights`] | auxiliary weight families and their curvature budget |
//! | [`estimates`] | model-scale check of the main extension estimate |
//! | [`integrability`] | log-weight hypothesis classes and limit integrals |
//! | [`battery`] | a fixed set of well-formed test charts |
//!
//! Conventions used throughout:
//!
//! * Lebesgue measure is written through the Kähler form `ω = i Σ dz_j∧dz̄_j`,
//!   so `ω^n/n! = 2^n dλ`; on one coordinate `∫_{|z|<r} ω = 2π r²`.  The
//!   [`integrability`] module, which models Euclidean `dλ` statements, is the
//!   single exception and says so.
//! * Coordinates are 0-based in the API.
//! * Rationals are exact ([`Q`]); only evaluation points and integrals are
//!   floating point.

// Parameter checks are written `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod error;
pub mod estimates;
pub mod integrability;
pub mod lcv;
pub mod multiplier;
pub mod quadrature;
mod radial;
pub mod snc_model;
pub mod weights;

pub use error::{Error, Result};

/// Exact rational scalar used for weight coefficients and m-values.
pub type Q = num_rational::Ratio<i64>;

/// Converts an exact rational to the nearest `f64`.
pub fn q_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}
