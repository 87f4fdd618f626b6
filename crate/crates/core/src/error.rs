use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model or function parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Two objects that must share a shape do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A basis or grid would exceed the configured size cap.
    #[error("size limit exceeded: {what} would exceed the cap of {cap}")]
    SizeLimit { what: &'static str, cap: usize },

    /// The Fock space handed to a model builder does not carry the modes it needs.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// A numerical contract (Hermiticity, normalization, stability bound) was violated.
    #[error("contract violation ({invariant}): {detail}")]
    Contract { invariant: &'static str, detail: String },

    /// The closed form is undefined for the given input.
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter { name, reason: reason.into() }
    }

    pub(crate) fn contract(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Contract { invariant, detail: detail.into() }
    }
}
