use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Header or record layout does not match the expected CSV shape.
    #[error("format error: {0}")]
    Format(String),

    /// Not enough rows (or records) to carry out the requested step.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Internally inconsistent input data (e.g. unequal segment sizes).
    #[error("data error: {0}")]
    Data(String),

    /// The requested moments admit no nonnegative trivariate.
    #[error("no distribution: {0}")]
    NoDistribution(String),

    #[error("simplex did not converge within {0} pivots")]
    Convergence(usize),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the input data rather than the caller.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Format(_)
                | Error::InsufficientData(_)
                | Error::Data(_)
                | Error::Csv(_)
                | Error::Json(_)
        )
    }
}
