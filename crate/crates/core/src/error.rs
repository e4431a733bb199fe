use thiserror::Error;

/// Errors raised by channel construction, transforms and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument lies outside its admissible range.
    #[error("{field} = {value} is outside {range}")]
    Domain {
        field: &'static str,
        value: f64,
        range: &'static str,
    },

    /// A structured input (matrix, measure, mixture, spec string) is malformed.
    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    /// The measure has no BSC-mixture decomposition.
    #[error("measure is not symmetric under s -> 1 - s: {0}")]
    Asymmetric(String),

    /// A computation would exceed its configured size budget.
    #[error("resource cap exceeded: {what} needs {needed:.3e}, limit {limit:.3e}{hint}")]
    ResourceCap {
        what: &'static str,
        needed: f64,
        limit: f64,
        hint: &'static str,
    },
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    /// True for resource-cap failures (mapped to a distinct CLI exit status).
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCap { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(field: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            field,
            value,
            range: "[0, 1]",
        })
    }
}
