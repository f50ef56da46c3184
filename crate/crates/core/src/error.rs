use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum HmfError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: fields live on different phase grids")]
    GridMismatch,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported Casimir family for this operation: {0}")]
    Unsupported(String),

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("could not bracket the root of {0}")]
    BracketFailure(&'static str),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("ODE integration blew up at theta = {theta}")]
    BlowUp { theta: f64 },

    #[error("solver aborted at step {step}: {reason}")]
    SolverAbort { step: usize, reason: String },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = HmfError> = std::result::Result<T, E>;
