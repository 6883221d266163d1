use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments or a precondition the caller violated.
    #[error("usage error: {0}")]
    Usage(String),

    /// The instance admits no feasible solution.
    #[error("infeasible instance: {0}")]
    Infeasible(String),

    /// The request exceeds a configured enumeration budget.
    #[error("work limit exceeded: {0}")]
    WorkLimit(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("load error: {0}")]
    Load(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) => 2,
            Error::WorkLimit(_) => 4,
            _ => 3,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInstance(msg.into())
}
