//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong, from bad inputs to optimisers giving up.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violates a documented precondition or domain constraint.
    #[error("invalid input: {message}")]
    InvalidInput { message: String },

    /// The requested value does not exist (e.g. an option price outside the
    /// arbitrage bounds has no implied volatility).
    #[error("no solution: {message}")]
    NoSolution { message: String },

    /// An iterative routine hit its cap before reaching tolerance.
    #[error("failed to converge after {iterations} iterations: {message}")]
    NonConvergence { iterations: usize, message: String },

    /// A series is too short for the requested computation.
    #[error("insufficient data: need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    /// A numerical operation broke down (singular matrix, degenerate variance, ...).
    #[error("numerical failure: {message}")]
    Numerical { message: String },

    /// Malformed input file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A data row fails a domain invariant. `row` is 1-based and counts data
    /// rows, not file lines.
    #[error("invariant violation at row {row}, field `{field}`: {message}")]
    InvariantViolation {
        row: usize,
        field: &'static str,
        message: String,
    },

    /// A strike required by a structure is not on the smile grid.
    #[error("strike {strike} not present in smile grid")]
    StrikeMissing { strike: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid_input(message: impl Into<String>) -> Self {
        Error::InvalidInput {
            message: message.into(),
        }
    }

    pub(crate) fn no_solution(message: impl Into<String>) -> Self {
        Error::NoSolution {
            message: message.into(),
        }
    }

    pub(crate) fn numerical(message: impl Into<String>) -> Self {
        Error::Numerical {
            message: message.into(),
        }
    }

    /// True for failures of the numerics (as opposed to bad user input);
    /// the CLI maps these to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoSolution { .. } | Error::NonConvergence { .. } | Error::Numerical { .. }
        )
    }
}

pub(crate) fn validate_finite(value: f64, name: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid_input(format!(
            "{name} must be finite, got {value}"
        )))
    }
}

pub(crate) fn validate_positive(value: f64, name: &str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid_input(format!(
            "{name} must be a positive finite number, got {value}"
        )))
    }
}

pub(crate) fn validate_non_negative(value: f64, name: &str) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid_input(format!(
            "{name} must be a non-negative finite number, got {value}"
        )))
    }
}
