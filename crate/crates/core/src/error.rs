use thiserror::Error;

/// Errors raised across the library. Each variant maps onto a distinct CLI
/// exit code via [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("size mismatch: expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("non-finite sample encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("tail is not integrable: fitted integrand slope {slope:.4} >= -1")]
    NonIntegrableTail { slope: f64 },

    #[error("iteration failed to contract: {0}")]
    NotContracting(String),

    #[error("fit rejected: {0}")]
    Fit(String),

    #[error("malformed config: {0}")]
    Config(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI. Usage errors (unknown flags) are
    /// reported by the argument parser with code 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Format(_) => 3,
            Error::InvalidParameter(_) | Error::Precondition(_) | Error::SizeMismatch { .. } => 4,
            Error::NonFinite { .. }
            | Error::NonIntegrableTail { .. }
            | Error::NotContracting(_)
            | Error::Fit(_) => 5,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 6,
        }
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Precondition(_) => "precondition",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::NonFinite { .. } => "non_finite",
            Error::NonIntegrableTail { .. } => "non_integrable_tail",
            Error::NotContracting(_) => "not_contracting",
            Error::Fit(_) => "fit",
            Error::Config(_) => "config",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
