use thiserror::Error;

/// Errors raised by the force and quadrature routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasimirError {
    /// `ε(iξ)` diverges at `ξ = 0`; integrals must map the variable away from it.
    #[error("static-limit singularity: the plasma permittivity diverges at xi = 0")]
    StaticLimit,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid quadrature settings: {0}")]
    InvalidQuadrature(String),
    /// The best available estimate is carried along so callers can still report it.
    #[error("{what} did not converge: value {value:e}, error estimate {error:e}")]
    NotConverged {
        what: &'static str,
        value: f64,
        error: f64,
    },
    #[error("invalid fit window: {0}")]
    InvalidWindow(String),
}

pub type Result<T> = std::result::Result<T, CasimirError>;

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CasimirError::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

pub(crate) fn require_non_negative(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CasimirError::InvalidParameter(format!(
            "{name} must be non-negative and finite, got {value}"
        )))
    }
}
