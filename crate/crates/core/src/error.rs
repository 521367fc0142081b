//! Error type shared by construction, simulation, and diagnostics.

use thiserror::Error;

/// Why a simulated path was abandoned before reaching its horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortKind {
    /// State or increment became NaN/infinite.
    NonFinite,
    /// State exceeded the overflow guard (1e30).
    Overflow,
    /// Step size collapsed below the numerically meaningful minimum.
    StepUnderflow,
}

impl std::fmt::Display for AbortKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AbortKind::NonFinite => "non-finite state",
            AbortKind::Overflow => "state overflow",
            AbortKind::StepUnderflow => "step underflow",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error(
        "horizon exhausted: time change reaches {available:.6} but {required:.6} was requested; \
         resimulate the driving path with a longer horizon"
    )]
    HorizonExhausted { available: f64, required: f64 },

    #[error("path aborted ({kind}) at t = {t:.6e}, step {step}, state {state:.6e}")]
    PathAborted {
        kind: AbortKind,
        t: f64,
        step: usize,
        state: f64,
    },

    #[error("horizon too short: censored fraction {fraction:.4} exceeds limit {limit:.4}")]
    CensoringTooHigh { fraction: f64, limit: f64 },

    #[error(
        "moment ladder bound violated: v_{q}({xi:.4}) = {value:.6e} exceeds q!*C^q = {bound:.6e}"
    )]
    LadderBound { q: usize, xi: f64, value: f64, bound: f64 },

    #[error("negative diffusion coefficient: v({z:.4}) = {value:.3e} below tolerance")]
    NegativeDiffusion { z: f64, value: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
