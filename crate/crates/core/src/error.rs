use thiserror::Error;

/// Errors raised by parameter validation, scheduling and estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("scheme 1 requires an even cooperation budget D >= 2, got D = {0}")]
    Scheme1Budget(u32),

    #[error("user index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("K = {k} is too large for exhaustive enumeration (at most {max})")]
    EnumerationTooLarge { k: usize, max: usize },

    #[error("malformed realization: {0}")]
    MalformedRealization(String),

    #[error("trial {trial}: achieved sum MG {achieved} exceeds the converse bound {bound}")]
    ConverseViolation {
        trial: u64,
        achieved: f64,
        bound: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie in [0, 1], got {p}")))
    }
}
