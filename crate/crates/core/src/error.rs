use thiserror::Error;

use crate::fields::SystemState;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum MzkError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("solver failure: {message}")]
    SolverFailure {
        message: String,
        /// Free-form numeric diagnostics (bracket ends, residuals, iteration count).
        diagnostics: Vec<(String, f64)>,
    },

    #[error("profile solve did not converge after {iterations} iterations (residuals {residual_norms:?})")]
    ProfileUnconverged {
        iterations: usize,
        residual_norms: (f64, f64),
        last: Box<crate::selfsimilar::ProfilePair>,
    },

    #[error("blow-up reached at t = {t}: {reason}")]
    BlowUpReached {
        t: f64,
        reason: String,
        last_valid: Box<SystemState>,
    },

    #[error("accuracy: {quantity} drift {drift:e} exceeds tolerance {tolerance:e}")]
    Accuracy {
        quantity: &'static str,
        drift: f64,
        tolerance: f64,
    },

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("checkpoint format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MzkError {
    pub(crate) fn solver(message: impl Into<String>, diagnostics: Vec<(&str, f64)>) -> Self {
        MzkError::SolverFailure {
            message: message.into(),
            diagnostics: diagnostics
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }

    /// Short machine-readable tag used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            MzkError::InvalidGrid(_) => "invalid-grid",
            MzkError::InvalidField(_) => "invalid-field",
            MzkError::Domain { .. } => "domain",
            MzkError::Contract(_) => "contract",
            MzkError::Degenerate(_) => "degenerate",
            MzkError::SolverFailure { .. } => "solver-failure",
            MzkError::ProfileUnconverged { .. } => "solver-failure",
            MzkError::BlowUpReached { .. } => "blow-up-reached",
            MzkError::Accuracy { .. } => "accuracy",
            MzkError::FitFailure(_) => "fit-failure",
            MzkError::Config { .. } => "config",
            MzkError::Format(_) => "format",
            MzkError::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, MzkError>;
