use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("cannot read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("column not found: {0}")]
    ColumnNotFound(String),

    #[error("row {row}, column {column}: {message}")]
    Parse {
        /// One-based data row, not counting the header.
        row: usize,
        column: String,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Model(#[from] covreg::Error),

    /// Lake Huron reproduction outside tolerance.
    #[error("{0}")]
    Deviation(String),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::FileNotFound(_) | CliError::Io { .. } | CliError::Output(_) => "io",
            CliError::ColumnNotFound(_) | CliError::Parse { .. } | CliError::Usage(_) => "parse",
            CliError::Model(e) => e.category(),
            CliError::Deviation(_) => "domain",
        }
    }

    /// 2 for usage and input problems, 1 for numerical or model failures.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "io" | "parse" => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
