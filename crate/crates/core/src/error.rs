use thiserror::Error;

use crate::numerics::Domain;

/// Failures while decoding an on-disk artifact.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic bytes {0:?}, expected \"EPIK\"")]
    BadMagic([u8; 4]),
    #[error("unsupported EPIK version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown domain tag {0}")]
    BadDomainTag(u8),
    #[error("nonzero reserved header byte {0}")]
    BadReserved(u8),
    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(u64),
    #[error("dimensions {n_cols}x{n_rows} overflow the addressable payload size")]
    DimensionOverflow { n_cols: u32, n_rows: u32 },
    #[error("malformed PGM: {0}")]
    Pgm(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("unrecognized input file (no EPIK or P5 magic)")]
    UnknownInput,
}

/// Coarse failure classes; these map one-to-one onto CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Format,
    Config,
    Numeric,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Io => 1,
            ErrorClass::Format => 2,
            ErrorClass::Config => 3,
            ErrorClass::Numeric => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix dimensions {n_cols}x{n_rows}: both must be even and >= 2")]
    InvalidDimensions { n_cols: usize, n_rows: usize },
    #[error("data length {found} does not match {n_cols}x{n_rows}")]
    LengthMismatch {
        n_cols: usize,
        n_rows: usize,
        found: usize,
    },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("operation requires {expected:?} data, got {found:?}")]
    WrongDomain { expected: Domain, found: Domain },
    #[error("alternate-row reversal has already been applied")]
    ReversalAlreadyApplied,
    #[error("alternate-row reversal has not been applied yet")]
    ReversalNotApplied,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("parity partition is not exhaustive and disjoint: {0}")]
    BadPartition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("peak undefined: row {row} (1-indexed) is all zero")]
    PeakUndefined { row: usize },
    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) => ErrorClass::Io,
            Error::Format(_) => ErrorClass::Format,
            Error::NonFinite(_) | Error::UndefinedMetric(_) | Error::PeakUndefined { .. } => {
                ErrorClass::Numeric
            }
            _ => ErrorClass::Config,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class().exit_code()
    }
}

pub type Result<T> = std::result::Result<T, Error>;
