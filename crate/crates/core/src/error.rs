use thiserror::Error;

#[derive(Debug, Error)]
pub enum HohlError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("eigensolver converged {converged} of {requested} eigenpairs")]
    EigenNotConverged { converged: usize, requested: usize },

    #[error("matrix is not positive definite even after ridge shift {ridge:.3e}")]
    NotPositiveDefinite { ridge: f64 },

    #[error("operator too large to materialize: {entries} entries exceeds budget {budget}")]
    TooLarge { entries: usize, budget: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, HohlError>;

pub(crate) fn invalid(msg: impl Into<String>) -> HohlError {
    HohlError::InvalidInput(msg.into())
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> HohlError {
    HohlError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub(crate) fn parse_err(path: &std::path::Path, line: usize, message: impl Into<String>) -> HohlError {
    HohlError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}
