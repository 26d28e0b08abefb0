use thiserror::Error;

/// Errors reported by the library.
///
/// Index-out-of-range conditions on element or range ids are contract
/// violations and panic instead of producing one of these.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot sample from a distribution with zero total weight")]
    EmptyDistribution,

    #[error("edge sample exhausted after {drawn} of {requested} edges")]
    InfeasibleSample { drawn: usize, requested: usize },

    #[error("instance too large for exhaustive search: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed data: {0}")]
    Data(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
