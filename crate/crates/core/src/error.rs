use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {field} {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("{what} = {value} is outside its domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("{what} = {value} is outside the table range [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("numeric overflow while computing {0}")]
    NumericOverflow(&'static str),

    #[error("no vibration detected (peak {peak:.3e} vs off-peak median {median:.3e})")]
    NoVibration { peak: f64, median: f64 },

    #[error("sample window holds {filled} of {capacity} samples")]
    WindowNotFull { filled: usize, capacity: usize },

    #[error("generated table breaks monotonicity in column {column} at row {row}")]
    MonotonicityViolation { column: &'static str, row: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("table invariant violated in column {column} at line {line}")]
    InvariantViolation { column: &'static str, line: u64 },

    #[error("all {0} trials failed")]
    AllTrialsFailed(usize),

    #[error("configuration error for {key}: {message}")]
    Config { key: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Configuration problems map to exit code 2, everything else to 1.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}
