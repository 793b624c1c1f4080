use thiserror::Error;

/// Broad classification used by front ends to pick exit codes and messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    PhysicsRegime,
    NumericalInstability,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::PhysicsRegime => "physics-regime",
            ErrorCategory::NumericalInstability => "numerical-instability",
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid extremum geometry: {0}")]
    InvalidGeometry(String),

    #[error("metastable well has vanished at bias {bias} V")]
    WellVanished { bias: f64 },

    #[error("potential is not a double well: found {found} stationary points in the search window")]
    NoDoubleWell { found: usize },

    #[error("x = {x} Å is not a minimum (V'' = {curvature} meV/Å²)")]
    NotAMinimum { x: f64, curvature: f64 },

    #[error("norm drift {drift:e} exceeds tolerance; retry with dt <= {suggested_dt:e} ps")]
    IntegratorInstability { drift: f64, suggested_dt: f64 },

    #[error("no quasi-degenerate doublet: {0}")]
    NoDoublet(String),

    #[error("trace is not two-level (rms = {rms:.4})")]
    NotTwoLevel { rms: f64, t_max: f64 },

    #[error("bracket [{lo}, {hi}] V does not contain an interior maximum")]
    BadBracket { lo: f64, hi: f64 },

    #[error("bias range contains no point with a metastable well")]
    EmptyScan,

    #[error("no switching orbit found: {0}")]
    NoSwitching(String),

    #[error("squeezing chart is singular at v = {v:e}")]
    SingularChart { v: f64 },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidInput(_) | Error::InvalidGeometry(_) | Error::BadBracket { .. } => {
                ErrorCategory::Config
            }
            Error::IntegratorInstability { .. } | Error::SingularChart { .. } => {
                ErrorCategory::NumericalInstability
            }
            Error::WellVanished { .. }
            | Error::NoDoubleWell { .. }
            | Error::NotAMinimum { .. }
            | Error::NoDoublet(_)
            | Error::NotTwoLevel { .. }
            | Error::EmptyScan
            | Error::NoSwitching(_) => ErrorCategory::PhysicsRegime,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
