use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {0} is not a finite number")]
    NonFinite(f64),

    #[error("value {value} is outside [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("retinex recursion is undefined for x0 = 0 (pixel value 1 is a fixed point)")]
    ZeroInitialValue,

    #[error("partial sum overflowed at term {term}")]
    Overflow { term: u32 },

    #[error("level count must be at least 1, got {0}")]
    InvalidLevels(u32),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("buffer of length {len} does not match {width}x{height}x{channels}")]
    BufferShape {
        len: usize,
        width: usize,
        height: usize,
        channels: usize,
    },

    #[error("unsupported channel count {0}, expected 1 or 3")]
    Channels(usize),

    #[error("image is empty")]
    EmptyImage,

    #[error("image shapes differ: {a:?} vs {b:?}")]
    ShapeMismatch {
        a: (usize, usize, usize),
        b: (usize, usize, usize),
    },

    #[error("image {width}x{height} is smaller than the {window}x{window} SSIM window")]
    TooSmall {
        width: usize,
        height: usize,
        window: usize,
    },

    #[error("decode failed: {0}")]
    Decode(String),

    #[error("encode failed: {0}")]
    Encode(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },

    #[error("duplicate sample id `{0}`")]
    DuplicateId(String),

    #[error("no matching low/reference pairs found")]
    NoPairs,

    #[error("every pair failed to evaluate ({0} errors)")]
    AllPairsFailed(usize),

    #[error("benchmark needs at least 3 repeats, got {0}")]
    TooFewRepeats(usize),

    #[error("benchmark dimensions must be at least 16x16, got {width}x{height}")]
    BenchTooSmall { width: usize, height: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
