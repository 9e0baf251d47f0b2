use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column {0} has zero variance")]
    ZeroVarianceColumn(usize),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("coefficient matrix has a nonzero diagonal entry at {0}")]
    NonzeroDiagonal(usize),

    #[error("column {0} has zero norm")]
    ZeroColumn(usize),

    #[error("degrees of freedom {df} not below n*p = {np}")]
    DegenerateDf { df: f64, np: f64 },

    #[error("binomial response must be 0 or 1 (found {0})")]
    NonBinaryResponse(f64),

    #[error("solver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("every penalty factor is infinite; no feature can enter the model")]
    AllWeightsInfinite,

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("ground truth support is not available")]
    MissingGroundTruth,

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroVarianceColumn(_) => "ZeroVarianceColumn",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite { .. } => "NonFinite",
            Error::NonzeroDiagonal(_) => "NonzeroDiagonal",
            Error::ZeroColumn(_) => "ZeroColumn",
            Error::DegenerateDf { .. } => "DegenerateDf",
            Error::NonBinaryResponse(_) => "NonBinaryResponse",
            Error::NoConvergence(_) => "NoConvergence",
            Error::AllWeightsInfinite => "AllWeightsInfinite",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::MissingGroundTruth => "MissingGroundTruth",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}
