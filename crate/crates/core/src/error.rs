use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation must be at least {min}, got {got}")]
    Truncation { min: usize, got: usize },

    #[error("operator is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bipartite state given where a single mode is required; take a partial trace first")]
    BipartiteInput,

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("integration exceeded {steps} steps at t = {t}")]
    TooManySteps { steps: usize, t: f64 },

    #[error(
        "steady-state kernel is degenerate (second smallest |eigenvalue| {second:e} below {threshold:e}); use the propagate method with an initial state"
    )]
    DegenerateKernel { second: f64, threshold: f64 },

    #[error("no convergence to a steady state by t = {t} (residual {residual:e})")]
    NonConvergence { t: f64, residual: f64 },

    #[error("superoperator dimension {dim} exceeds the limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::TooManySteps { .. }
                | Error::DegenerateKernel { .. }
                | Error::NonConvergence { .. }
                | Error::Numerical(_)
        )
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
