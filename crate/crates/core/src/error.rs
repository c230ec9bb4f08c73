//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A closed-form geometry expression has a vanishing denominator or an
    /// inverse-trig argument outside its domain.
    #[error("degenerate geometry: {what} (value {value:e})")]
    DegenerateGeometry { what: String, value: f64 },

    #[error("no specular path: {0}")]
    NoSpecularPath(String),

    #[error("newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("singular system: condition estimate {condition:e}")]
    SingularSystem { condition: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A value violates a domain invariant; `field` names the offending field.
    #[error("validation failed for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("value of `{field}` = {value} outside [{lo}, {hi}]")]
    Range {
        field: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn degenerate(what: impl Into<String>, value: f64) -> Self {
        Error::DegenerateGeometry {
            what: what.into(),
            value,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// 2 covers input that was read but rejected; 3 covers numerical and
    /// convergence failures. Usage errors (1) are raised by argument parsing
    /// before this type is involved.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::Validation { .. }
            | Error::Range { .. }
            | Error::Parse { .. }
            | Error::Io { .. } => 2,
            Error::DegenerateGeometry { .. }
            | Error::NoSpecularPath(_)
            | Error::Convergence { .. }
            | Error::SingularSystem { .. }
            | Error::Numerical(_) => 3,
        }
    }
}
