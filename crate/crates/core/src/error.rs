use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystem(String),

    #[error("eigenvalue {0:e} of the operator product is significantly negative")]
    NegativeEigenvalue(f64),

    #[error("no sign change of the bracketing function on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("invalid protocol configuration: {0}")]
    InvalidConfig(String),

    #[error("estimation sample is empty (sifted length {sifted}, sample fraction {fraction})")]
    EmptySample { sifted: usize, fraction: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Checks `lo <= value <= hi`, rejecting NaN.
pub(crate) fn check_closed(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<f64> {
    if value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}

/// Checks `lo < value < hi`, rejecting NaN.
pub(crate) fn check_open(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<f64> {
    if value > lo && value < hi {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
