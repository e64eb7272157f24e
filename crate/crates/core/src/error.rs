use thiserror::Error;

/// Errors raised by the bound catalog, the family analysis and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("DomainError: argument {value} outside the domain ({what})")]
    Domain { what: &'static str, value: f64 },

    #[error("ParamError: {reason}")]
    Param { reason: String },

    #[error("SingularityError: 1 + a*sqrt(1+x^2) vanishes at a = {a}, x = {x}")]
    Singularity { a: f64, x: f64 },

    #[error("BracketError: no sign change of g for a = {a} after {steps} bracket steps")]
    Bracket { a: f64, steps: usize },

    #[error("ConvergenceError: residual {residual:e} above tolerance after {iterations} bisection steps (a = {a})")]
    Convergence { a: f64, iterations: usize, residual: f64 },

    #[error("PrecisionError: {reason}")]
    Precision { reason: String },

    #[error("GridError: {reason}")]
    Grid { reason: String },

    #[error("SideError: {reason}")]
    Side { reason: String },

    #[error("NoCrossingError: enclosure with a = {dominant} is at least as tight on every grid point")]
    NoCrossing { dominant: f64 },

    #[error("InvertedCrossingError: half-widths cross at x = {x}, but a_high is tighter below it")]
    InvertedCrossing { x: f64 },
}

impl BoundsError {
    pub(crate) fn param(reason: impl Into<String>) -> Self {
        BoundsError::Param { reason: reason.into() }
    }

    /// Stable error name, as surfaced by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            BoundsError::Domain { .. } => "DomainError",
            BoundsError::Param { .. } => "ParamError",
            BoundsError::Singularity { .. } => "SingularityError",
            BoundsError::Bracket { .. } => "BracketError",
            BoundsError::Convergence { .. } => "ConvergenceError",
            BoundsError::Precision { .. } => "PrecisionError",
            BoundsError::Grid { .. } => "GridError",
            BoundsError::Side { .. } => "SideError",
            BoundsError::NoCrossing { .. } => "NoCrossingError",
            BoundsError::InvertedCrossing { .. } => "InvertedCrossingError",
        }
    }
}

pub type Result<T, E = BoundsError> = std::result::Result<T, E>;

pub(crate) fn require_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::Domain { what: "x must be positive and finite", value: x })
    }
}
