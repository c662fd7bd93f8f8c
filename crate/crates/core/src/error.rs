use thiserror::Error;

/// Errors produced by the toolkit.
///
/// The variants split into two families: problems with the caller's input
/// (shapes, ranges, refused preconditions) and numerical failures (an
/// iteration that did not converge). The CLI maps them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("degenerate subspace basis: {0}")]
    DegenerateBasis(String),

    /// A documented precondition could not be established soundly.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The operation needs a verified certificate and did not get one.
    #[error("certificate not verified ({status}): {detail}")]
    Unverified { status: String, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
