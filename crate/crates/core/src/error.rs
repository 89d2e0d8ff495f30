use thiserror::Error;

/// Errors raised by the discretization, the functional and the solvers.
///
/// Values are carried as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value on triangle {triangle}: {detail}")]
    NonFiniteTriangle { triangle: usize, detail: String },

    #[error("non-finite value at vertex {vertex}: {detail}")]
    NonFiniteVertex { vertex: usize, detail: String },

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("no sign bracket after {rounds} rounds (last box [{eta1:e}, {eta2:e}]): {detail}")]
    BracketFailure {
        rounds: usize,
        eta1: f64,
        eta2: f64,
        detail: String,
    },

    #[error("projection onto the constraint set failed: {0}")]
    ProjectionFailure(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("linear algebra: {0}")]
    LinearAlgebra(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
