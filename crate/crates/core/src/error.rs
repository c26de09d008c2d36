use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FpwError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("fixed point did not converge after {iterations} iterations (last velocity {last_velocity} m/s)")]
    NotConverged {
        iterations: usize,
        last_velocity: f64,
    },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("no resonance found: {0}")]
    NoResonance(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, FpwError>;

pub(crate) fn invalid(msg: impl Into<String>) -> FpwError {
    FpwError::InvalidInput(msg.into())
}
