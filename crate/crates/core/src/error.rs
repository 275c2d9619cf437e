use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel is not stationary: branching ratio {branching_ratio} >= 1")]
    NonStationary { branching_ratio: f64 },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("{path}: {} malformed row(s): {}", .errors.len(), summarize(.errors))]
    MalformedRows {
        path: PathBuf,
        errors: Vec<(usize, String)>,
    },

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn summarize(errors: &[(usize, String)]) -> String {
    let mut out = errors
        .iter()
        .take(5)
        .map(|(line, msg)| format!("line {line}: {msg}"))
        .collect::<Vec<_>>()
        .join("; ");
    if errors.len() > 5 {
        out.push_str("; ...");
    }
    out
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by malformed or unusable input data.
    pub fn is_data(&self) -> bool {
        matches!(self, Error::Data(_) | Error::MalformedRows { .. } | Error::Csv(_) | Error::Insufficient(_))
    }

    /// True for errors caused by the input configuration rather than the data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::NonStationary { .. }
                | Error::InvalidGenerator(_)
                | Error::Config(_)
                | Error::Json(_)
        )
    }
}
