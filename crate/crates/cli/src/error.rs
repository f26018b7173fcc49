//! CLI-side errors: file handling, parsing, and table schema problems,
//! wrapping the library's domain errors.

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] madtest::Error),

    #[error("cannot {action} {path}: {source}")]
    Io {
        action: &'static str,
        path: String,
        source: std::io::Error,
    },

    #[error("{path}: row {row}, column {column}: {message}")]
    Parse {
        path: String,
        row: usize,
        column: String,
        message: String,
    },

    #[error("incompatible table {path}: {reason}")]
    IncompatibleTable { path: String, reason: String },

    #[error("corrupt table {path}: {reason}")]
    CorruptTable { path: String, reason: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
