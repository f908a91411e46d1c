use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A Monte Carlo cell aborted; carries the grid coordinates and the
    /// replicate that failed.
    #[error("cell (p_S={p_s}, n={n}) failed at replicate {replicate}: {source}")]
    Cell {
        p_s: usize,
        n: usize,
        replicate: usize,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }
}
