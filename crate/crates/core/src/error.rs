use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are inconsistent with the operation's contract.
    #[error("shape mismatch in {op}: expected {expected}, got {actual}")]
    ShapeMismatch {
        op: &'static str,
        expected: String,
        actual: String,
    },

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    /// An argument violates a documented precondition.
    #[error("invalid argument to {op}: {detail}")]
    InvalidArgument { op: &'static str, detail: String },

    /// A matrix that must be symmetric is not.
    #[error("matrix passed to {op} is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { op: &'static str, asymmetry: f64 },

    /// Dataset record failed to parse or validate.
    #[error("malformed dataset record at {locator}: {detail}")]
    MalformedRecord { locator: String, detail: String },

    /// Item ids shared between splits that must be disjoint.
    #[error("splits {left} and {right} share item ids: {ids:?}")]
    SplitOverlap {
        left: &'static str,
        right: &'static str,
        ids: Vec<String>,
    },

    /// An item id was looked up but is not present.
    #[error("unknown item id {id:?}{}", context.as_ref().map(|c| format!(" ({c})")).unwrap_or_default())]
    UnknownItem { id: String, context: Option<String> },

    /// Checkpoint file does not start with the expected magic string.
    #[error("not a compat checkpoint: bad magic {found:?}")]
    CheckpointMagic { found: String },

    /// Checkpoint format version is unsupported.
    #[error("unsupported checkpoint version {found} (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    /// Checkpoint file is truncated or otherwise unparseable.
    #[error("malformed checkpoint: {detail}")]
    CheckpointMalformed { detail: String },

    /// Checkpoint parameter arrays are inconsistent with their declared shapes.
    #[error("checkpoint shape inconsistency: {detail}")]
    CheckpointShape { detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(op: &'static str, expected: impl Into<String>, actual: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            op,
            expected: expected.into(),
            actual: actual.into(),
        }
    }

    pub(crate) fn invalid(op: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidArgument {
            op,
            detail: detail.into(),
        }
    }
}
