use alloc::boxed::Box;
use alloc::string::String;

use crate::cycle::SmoothingMode;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("invalid map `{map}`: {reason}")]
    InvalidMap { map: &'static str, reason: String },

    #[error("gear {gear} is not in the shift map (gears 1..={count})")]
    InvalidGear { gear: u8, count: u8 },

    #[error("invalid state: {0}")]
    InvalidState(&'static str),

    #[error("invalid drive cycle: {0}")]
    InvalidCycle(String),

    #[error("cycles cannot be compared: {0}")]
    InvalidPair(String),

    #[error("simulation diverged at step {step} (t = {time_s} s): {reason}")]
    Divergence {
        step: usize,
        time_s: f64,
        reason: &'static str,
    },

    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),

    #[error("sweep point m = {half_width}, mode = {mode}: {source}")]
    SweepPoint {
        half_width: usize,
        mode: SmoothingMode,
        source: Box<Error>,
    },
}

impl Error {
    /// True when the error (or the error wrapped by a sweep point) is a
    /// simulation divergence.
    pub fn is_divergence(&self) -> bool {
        match self {
            Error::Divergence { .. } => true,
            Error::SweepPoint { source, .. } => source.is_divergence(),
            _ => false,
        }
    }
}

pub(crate) fn ensure_finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidInput(what))
    }
}
