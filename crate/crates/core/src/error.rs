use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("element index ({n}, {m}) outside 1..={size}")]
    IndexOutOfRange { n: usize, m: usize, size: usize },

    #[error("field singularity: transmitter coincides with aperture point ({x}, {y})")]
    Singularity { x: f64, y: f64 },

    #[error("distance {distance} m lies in the reactive near-field (minimum {minimum} m)")]
    ReactiveNearField { distance: f64, minimum: f64 },

    #[error("azimuth {0} rad collapses the projected aperture")]
    DegenerateProjection(f64),

    #[error("quadrature did not converge: estimated error {estimate:e} after {subdivisions} subdivision(s)")]
    QuadratureFailure { estimate: f64, subdivisions: u32 },

    #[error("could not bracket the half-power point for eta = {0}")]
    Bracketing(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("linear solve failed: {0}")]
    Solve(&'static str),

    #[error("sweep failed at {} point(s), first at index {}: {}", .failures.len(), .failures[0].0, .failures[0].1)]
    Sweep { failures: Vec<(usize, Error)> },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::IndexOutOfRange { .. }
                | Error::DegenerateProjection(_)
                | Error::DimensionMismatch(_)
                | Error::Config(_)
        ) || matches!(self, Error::Sweep { failures } if failures.iter().all(|(_, e)| e.is_validation()))
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
