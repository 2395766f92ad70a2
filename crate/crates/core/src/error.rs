use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("kernel width must be odd and at least 1, got {0}")]
    EvenKernel(usize),

    #[error("no foreground pixels in silhouette")]
    NoForeground,

    #[error("slope interval is degenerate: both indices are {0}")]
    DegenerateInterval(usize),

    #[error("no histogram inclination reached the slope threshold")]
    NoInclination,

    #[error("invalid image dimensions {width}x{height} for {len} samples")]
    InvalidDimensions { width: usize, height: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed image {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
