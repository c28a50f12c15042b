use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value or operation argument is out of its domain.
    #[error("invalid `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("channel estimate is singular or ill-conditioned (condition number {condition:.3e})")]
    SingularChannel { condition: f64 },

    #[error("user {user} has an all-zero channel estimate")]
    DegenerateUser { user: usize },

    #[error("channel matrix is identically zero")]
    ZeroChannel,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("realization {realization}: precoder construction failed after {attempts} resamples ({last})")]
    RetryBudget {
        realization: usize,
        attempts: usize,
        last: Box<Error>,
    },

    #[error("svd did not converge")]
    SvdFailed,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("scenario parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user input rather than by the simulation itself.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::Parse(_))
    }
}
