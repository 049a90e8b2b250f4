use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular to working precision")]
    SingularMatrix,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("too few observations: need at least {needed}, found {found}")]
    TooFewObservations { needed: usize, found: usize },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("AR model is not stationary")]
    NonStationaryModel,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Coarse machine-readable category used by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::SingularMatrix => "singular",
            Error::DimensionMismatch { .. } | Error::TooFewObservations { .. } => "dimension",
            Error::NonFinite { .. } => "parse",
            Error::ZeroVariance
            | Error::NonStationaryModel
            | Error::InvalidScenario(_)
            | Error::InvalidArgument(_) => "domain",
        }
    }
}
