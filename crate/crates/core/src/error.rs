use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state is in stage {found}, operation requires {expected}")]
    WrongStage {
        expected: &'static str,
        found: &'static str,
    },

    #[error("state is in the {found} mode frame, operation requires {expected}")]
    WrongFrame {
        expected: &'static str,
        found: &'static str,
    },

    #[error("unknown detection pattern `{0}`")]
    UnknownPattern(String),

    #[error("input state has no photon on amplitude {amplitude:e}; heralding assumes both photons arrive")]
    PhotonMissing { amplitude: f64 },

    #[error("quadrature did not converge: doubling points changed the result by {change:e}")]
    NonConvergence { change: f64 },

    #[error("degenerate cloud geometry: {0}")]
    DegenerateGeometry(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects NaN and values outside `[lo, hi]`.
pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_nan() || value < lo || value > hi {
        return Err(Error::param(
            name,
            format!("{value} is outside [{lo}, {hi}]"),
        ));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_nan() || value <= 0.0 {
        return Err(Error::param(name, format!("{value} must be > 0")));
    }
    Ok(())
}
