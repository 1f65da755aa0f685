use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Enumeration would exceed the configured cap; raise the cap to proceed.
    #[error("enumeration cap of {cap} exceeded")]
    CapExceeded { cap: u64 },

    /// A strong attribute reached a computation that requires normalized
    /// (weak or point) attributes.
    #[error("event {0} carries a strong attribute; apply normalize_strong first")]
    NotNormalized(String),

    /// Attempted to fire a transition whose input places lack tokens.
    #[error("transition {0} is not enabled")]
    NotEnabled(String),

    /// The alignment search exhausted the state space without reaching the
    /// final marking.
    #[error("no alignment reaches the final marking")]
    Unalignable,

    /// A simulation step found no enabled transition at a non-final marking.
    #[error("simulation deadlock at non-final marking")]
    Deadlock,

    /// Two included events share an identical point timestamp and strict tie
    /// handling is in effect.
    #[error("exact timestamp tie between events {0} and {1}")]
    TimestampTie(String, String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
