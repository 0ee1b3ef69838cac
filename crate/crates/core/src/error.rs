//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building sequences, integrating, or
/// evaluating states.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its domain (negative frequency, non-positive
    /// duration, unsorted pulse times, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A time or frequency falls outside the interval it must lie in.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Matrix dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numerical procedure did not reach its accuracy target. Carries the
    /// partial value and the error actually achieved so callers can decide
    /// whether the result is still usable.
    #[error("numeric failure: {context} (partial value {value:.6e}, achieved error {achieved_error:.3e})")]
    NumericFailure {
        context: String,
        value: f64,
        achieved_error: f64,
    },

    /// A numeric failure that occurred at a specific grid point of a sweep.
    #[error("numeric failure at grid point {index} (t = {t}): {source}")]
    AtGridPoint {
        index: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    /// The mean spin vanishes, so no squeezing direction exists.
    #[error("mean spin direction is degenerate (|<J>| = {0:.3e})")]
    DegenerateDirection(f64),

    /// An operation that requires a pure state received a mixed one.
    #[error("state is not pure (purity = {0})")]
    NotPure(f64),

    /// A configuration file or override could not be understood.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
