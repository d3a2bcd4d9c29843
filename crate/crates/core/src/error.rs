use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("range error: {0}")]
    Range(String),

    /// The dense search space would exceed the configured cell cap.
    #[error("resource cap exceeded: {requested} cells requested, cap is {cap}")]
    Resource { requested: u128, cap: u64 },

    /// A decomposition needed a ray power beyond the truncation depth.
    #[error("ray depth {depth} exhausted; rebuild the generator set with depth >= {required}")]
    Depth { depth: u32, required: u32 },

    #[error(
        "density error at stage {stage}: best collision count above {threshold} is {achieved}, need {required}"
    )]
    Density {
        stage: usize,
        threshold: u64,
        achieved: usize,
        required: u64,
    },

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn overflow(msg: impl Into<String>) -> Self {
        Error::Overflow(msg.into())
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}
