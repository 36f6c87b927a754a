//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by model construction, samplers, theory evaluators and
/// statistics.
#[derive(Debug, Error)]
pub enum Error {
    /// A model or evaluator parameter violates its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Vertex id outside `1..=t`.
    #[error("vertex {vertex} out of range 1..={max}")]
    VertexOutOfRange { vertex: u32, max: u64 },

    /// An observation schedule names a time outside `1..=horizon` or is not
    /// strictly increasing.
    #[error("invalid observation time {time} (horizon {horizon})")]
    InvalidObservationTime { time: u64, horizon: u64 },

    /// Assortativity denominator is zero: every edge joins endpoints of
    /// equal degree, so the correlation is undefined.
    #[error("assortativity undefined: degree-regular edge set")]
    AssortativityUndefined,

    /// A fit or test was asked to run on fewer points than it needs.
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// An empirical distribution with no mass was passed to a comparison.
    #[error("empty histogram")]
    EmptyHistogram,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
