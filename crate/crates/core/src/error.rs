use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-domain input (empty lists, negative coordinates, c ≤ 0, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A theorem hypothesis does not hold, e.g. the ideal is contained in (z_p),
    /// so the weight restricted to the hyperplane is identically -inf.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid oracle configuration: {0}")]
    Config(String),

    /// An exact certificate failed to re-verify. Indicates a bug, never bad input.
    #[error("internal certificate check failed: {0}")]
    Certificate(String),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
