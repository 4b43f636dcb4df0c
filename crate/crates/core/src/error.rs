use thiserror::Error;

use crate::optimize::DetuningOptimum;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parameter `{name}` must be nonnegative (got {value})")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("parameter `{name}` is not finite")]
    NonFinite { name: &'static str },

    #[error("coupling phase {0} is outside [0, 2π)")]
    PhaseOutOfRange(f64),

    #[error("shared-bath weight {0} is zero; |μ| = 1 normalization is undefined")]
    ZeroCoupling(&'static str),

    #[error("step size fell below {min_step:e} at t = {t}")]
    StepUnderflow { t: f64, min_step: f64 },

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("steady-state linear system is singular (an undamped normal mode)")]
    SingularSystem,

    #[error("steady-state denominator vanishes; stored energy diverges")]
    DivergentSteadyState,

    #[error("no interior detuning optimum (Δ_in² < κ²/8); falling back to Δ = 0")]
    NoInteriorOptimum { fallback: Box<DetuningOptimum> },

    #[error("rate `{0}` must be strictly positive")]
    ZeroRate(&'static str),

    #[error("expression has a pole: (κ_a − κ_b)² = 4·{0}²")]
    PoleAtResonance(&'static str),

    #[error("Fock truncation too small: tail occupation {tail:e} exceeds {limit:e}")]
    TruncationOverflow { tail: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config { path: path.into(), message: message.into() }
    }

    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), message: err.to_string() }
    }

    /// True for errors caused by the input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Self::Config { .. }
                | Self::NegativeRate { .. }
                | Self::NonFinite { .. }
                | Self::PhaseOutOfRange(_)
                | Self::ZeroCoupling(_)
                | Self::ZeroRate(_)
                | Self::InvalidArgument(_)
        )
    }
}
