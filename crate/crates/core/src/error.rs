use thiserror::Error;

/// Errors raised by the solvers, samplers and the experiment harness.
#[derive(Debug, Error)]
pub enum FracError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("point {point:?} lies outside the domain")]
    PointOutsideDomain { point: Vec<f64> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigensolve failed: {0}")]
    Eigensolve(String),

    #[error("series truncation insufficient: tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    TruncationInsufficient { bound: f64, tolerance: f64 },

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("solution routes disagree: {0}")]
    RouteMismatch(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl FracError {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        FracError::InvalidParameter { name, value, reason }
    }

    /// Short machine-readable tag used in the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            FracError::InvalidParameter { .. } => "invalid_parameter",
            FracError::PointOutsideDomain { .. } => "point_outside_domain",
            FracError::Config(_) => "config_error",
            FracError::Unsupported(_) => "unsupported",
            FracError::Eigensolve(_) => "eigensolve_failed",
            FracError::TruncationInsufficient { .. } => "truncation_insufficient",
            FracError::NonConvergence(_) => "non_convergence",
            FracError::RouteMismatch(_) => "route_mismatch",
            FracError::Io(_) => "io_error",
            FracError::Json(_) => "json_error",
        }
    }

    /// True for errors caused by the caller's input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            FracError::InvalidParameter { .. }
                | FracError::PointOutsideDomain { .. }
                | FracError::Config(_)
                | FracError::Unsupported(_)
                | FracError::Json(_)
                | FracError::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, FracError>;
