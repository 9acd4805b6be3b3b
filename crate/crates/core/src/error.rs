//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid PGM data: {detail}")]
    PgmFormat { path: PathBuf, detail: String },

    #[error("{path}: PGM maxval {maxval} exceeds 255")]
    PgmMaxval { path: PathBuf, maxval: u32 },

    #[error("{path}: PGM pixel payload truncated: expected {expected} values, found {found}")]
    PgmTruncated {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("{path}: bad IDX magic: expected {expected:#010x}, found {found:#010x}")]
    IdxMagic {
        path: PathBuf,
        expected: u32,
        found: u32,
    },

    #[error("IDX record count mismatch: {images} images vs {labels} labels")]
    IdxCountMismatch { images: usize, labels: usize },

    #[error("{path}: IDX payload truncated: expected {expected} bytes, found {found}")]
    IdxTruncated {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("label {label} outside class range 0..{classes}")]
    InvalidLabel { label: usize, classes: usize },

    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },

    #[error("pixel buffer length {len} does not match {width}x{height}")]
    PixelCountMismatch {
        width: usize,
        height: usize,
        len: usize,
    },

    #[error("image contains no ink pixels")]
    EmptyGlyph,

    #[error("rectangle ({x0},{y0}) {w}x{h} exceeds image bounds {width}x{height}")]
    RectOutOfBounds {
        x0: usize,
        y0: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error("input length {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires at least {need} samples, got {have}")]
    TooFewSamples { have: usize, need: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training diverged at epoch {epoch}: non-finite values encountered")]
    Divergence { epoch: usize },

    #[error("{path}: invalid model file: {detail}")]
    ModelFormat { path: PathBuf, detail: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
