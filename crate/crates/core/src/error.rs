//! Error type shared by all analysis modules.

use thiserror::Error;

/// Result alias with the crate error type.
pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the analysis operations.
///
/// The variants are grouped by how a caller should react: precondition and
/// parameter errors mean the input is wrong, convergence errors mean the
/// numerics could not certify an answer, and [`Error::Divergent`] reports an
/// integral that is provably infinite where a finite value was required.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An operation precondition does not hold for the supplied data.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A numeric parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A weight function was evaluated outside its domain.
    #[error("t = {t} lies outside the weight domain t < {bound}")]
    Domain { t: f64, bound: f64 },

    /// Quadrature did not meet its tolerance within the node budget.
    #[error(
        "quadrature did not converge with {nodes} nodes per axis: \
         last two refinements {previous:e} and {last:e}"
    )]
    NonConvergence {
        nodes: usize,
        previous: f64,
        last: f64,
    },

    /// The ε-limit classification could not be decided.
    #[error(
        "inconclusive lc-measure classification ({reason}); eps = {eps:?}, integrals = {values:?}"
    )]
    Inconclusive {
        reason: String,
        eps: Vec<f64>,
        values: Vec<f64>,
    },

    /// An integral required to be finite is infinite.
    #[error("divergent integral: {0}")]
    Divergent(String),
}
