use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse configuration: {0}")]
    Parse(String),

    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error(
        "inverse propagator is singular (|det| = {det:e}); the point sits on a quasiparticle pole"
    )]
    SingularPropagator { det: f64 },

    #[error("total state vanishes (norm = {norm:e})")]
    ZeroState { norm: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Numeric code written into sweep rows when a point fails.
    pub fn diagnostic_code(&self) -> i64 {
        match self {
            Error::SingularPropagator { .. } => -1,
            Error::ZeroState { .. } => -2,
            Error::Invalid { .. } => -3,
            Error::Parse(_) | Error::Io(_) => -4,
        }
    }
}
