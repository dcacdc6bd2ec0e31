use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty set: {0}")]
    Empty(String),
    #[error("origin is not contained in the set ({0})")]
    OriginNotContained(String),
    #[error("point is not in the set: {0}")]
    NotMember(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

impl GeomError {
    pub fn unsupported(msg: impl Into<String>) -> Self {
        GeomError::Unsupported(msg.into())
    }

    pub fn is_unsupported(&self) -> bool {
        matches!(self, GeomError::Unsupported(_))
    }
}
