use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure class, used to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Io,
    Integrity,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("elevation {0} rad is outside [-pi/2, pi/2]")]
    InvalidElevation(f64),
    #[error("non-finite angle")]
    NonFiniteAngle,
    #[error("cannot take the direction of a zero-length vector")]
    ZeroVector,
    #[error("empty signal")]
    EmptySignal,
    #[error("channel {channel} has {got} samples, expected {expected}")]
    ChannelLength {
        channel: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-finite sample in channel {channel} at index {index}")]
    NonFinite { channel: usize, index: usize },
    #[error("expected {expected} channels, got {got}")]
    ChannelCount { expected: usize, got: usize },
    #[error("sample rate {got} Hz does not match expected {expected} Hz")]
    SampleRateMismatch { expected: u32, got: u32 },
    #[error("signal lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid room: {0}")]
    InvalidRoom(String),
    #[error("{what} position {pos:?} is not strictly inside the room")]
    OutsideRoom { what: &'static str, pos: [f64; 3] },
    #[error("source and receiver coincide")]
    ZeroDistance,
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("invalid material `{name}`: {reason}")]
    InvalidMaterial { name: String, reason: String },
    #[error("RIR length {got} samples is shorter than the latest path, which needs {required}")]
    RirTooShort { required: usize, got: usize },
    #[error("rejection sampling gave up after {0} attempts")]
    RetryCapExhausted(usize),

    #[error("target render has zero energy")]
    DegenerateTarget,
    #[error("scene must contain exactly one non-silenced target, found {0} targets")]
    TargetCount(usize),
    #[error("clip pool exhausted: {0}")]
    PoolExhausted(String),
    #[error("RIR bank has no scene with at least {0} sources")]
    NoCompleteScene(usize),

    #[error("direction grid `{0}` does not have full column rank")]
    RankDeficientGrid(String),
    #[error("invalid extractor configuration: {0}")]
    InvalidExtractor(String),

    #[error("reference signal has zero energy")]
    ZeroEnergyReference,
    #[error("no scores to aggregate")]
    EmptyScores,

    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("data integrity: {0}")]
    Integrity(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } | Error::Wav { .. } => ErrorKind::Io,
            Error::Integrity(_) | Error::Json { .. } => ErrorKind::Integrity,
            _ => ErrorKind::Config,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
