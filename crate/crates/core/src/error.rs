use thiserror::Error;

/// Errors raised by the rate-region toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The inputs are valid numbers but the operation is not defined for them
    /// (for example estimate-and-cancel with a narrow side-channel).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The side-channel carries zero rate, so no quantized description of the
    /// interference can be delivered.
    #[error("no compression possible: side-channel rate is zero")]
    NoCompression,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite_nonneg(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("{name} must be finite, got {x}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("{name} must be non-negative, got {x}")));
    }
    Ok(())
}

pub(crate) fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}
