use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message} at position {position}")]
    Parse { position: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Math(#[from] pforms::Error),
}

impl CliError {
    pub fn parse(position: usize, message: impl Into<String>) -> CliError {
        CliError::Parse { position, message: message.into() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Math(pforms::Error::ResourceLimit { .. }) => "resource",
            CliError::Math(pforms::Error::Internal(_)) => "internal",
            CliError::Math(_) => "math",
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport {
            schema: 1,
            error: ErrorBody {
                kind: self.kind(),
                message: self.to_string(),
                position: match self {
                    CliError::Parse { position, .. } => Some(*position),
                    _ => None,
                },
            },
        }
    }
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub schema: u32,
    pub error: ErrorBody,
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    pub position: Option<usize>,
}

pub type Result<T> = std::result::Result<T, CliError>;
