use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported coefficient system: {0}")]
    UnsupportedCoeff(String),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("base mismatch: {0}")]
    BaseMismatch(String),
    #[error("invalid {what}: {detail}")]
    Invalid { what: String, detail: String },
    #[error("law violation: {0}")]
    Law(String),
    #[error("missing adjoint for {0}")]
    MissingAdjoint(String),
    #[error("size bound exceeded: {0}")]
    SizeBound(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(what: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Invalid { what: what.into(), detail: detail.into() }
    }
}
