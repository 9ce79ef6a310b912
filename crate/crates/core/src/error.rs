use thiserror::Error;

/// Errors raised across the estimation and experiment pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 1 or 2, got {0}")]
    InvalidDimension(u32),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("level {j} in dimension {d} overflows the index width")]
    LevelOverflow { j: u32, d: u32 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("signal length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    #[error("filter of length {filter_len} is longer than signal of length {signal_len}")]
    FilterTooLong { filter_len: usize, signal_len: usize },

    #[error("unknown wavelet filter `{0}`")]
    UnknownFilter(String),

    #[error("density is identically zero after clipping")]
    DegenerateDensity,

    #[error("empty sample")]
    EmptySample,

    #[error("incompatible configuration: {0}")]
    Incompatible(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid `{field}`: {reason}")]
    Constraint { field: String, reason: String },

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) trait ResultExt<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T>;
}

impl<T, E: Into<Error>> ResultExt<T> for std::result::Result<T, E> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| Error::Context {
            context: context(),
            source: Box::new(e.into()),
        })
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
