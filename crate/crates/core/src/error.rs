use thiserror::Error;

/// Failures raised by an objective function backend.
#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("objective i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("protocol error on reply {line:?}: {reason}")]
    Protocol { line: String, reason: String },
    #[error("objective process exited unexpectedly")]
    ChildExited,
}

/// Failures of a single budget-tracked evaluation.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("point has non-finite component at index {0}")]
    NonFinite(usize),
    #[error("point has dimension {got}, problem expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Crate-level error for configuration, I/O and set-up failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("unknown test function {0:?}")]
    UnknownFunction(String),
    #[error("unknown heuristic {0:?}")]
    UnknownHeuristic(String),
    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error on {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
