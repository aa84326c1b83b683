//! Crate-wide error type.

use crate::raster::{BandRole, Dtype};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a VGR file: magic bytes {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("VGR header declares a {expected}-byte payload but the file carries {actual} bytes")]
    HeaderMismatch { expected: usize, actual: usize },

    #[error("unsupported dtype {0:?}")]
    UnsupportedDtype(String),

    #[error("invalid VGR header: {0}")]
    InvalidHeader(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("csv row {row} has {found} columns, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("csv row {row}, column {col}: non-numeric token {token:?}")]
    NonNumericToken {
        row: usize,
        col: usize,
        token: String,
    },

    #[error("dimension mismatch: {a_width}x{a_height} vs {b_width}x{b_height}")]
    DimensionMismatch {
        a_width: usize,
        a_height: usize,
        b_width: usize,
        b_height: usize,
    },

    #[error("expected a {expected} grid, found {found}")]
    DtypeMismatch { expected: Dtype, found: Dtype },

    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),

    #[error("band set is missing the {0} band")]
    MissingBand(BandRole),

    #[error("invalid band set: {0}")]
    InvalidBandSet(String),

    #[error("SAVI L factor must be non-negative and finite, got {0}")]
    NegativeL(f64),

    #[error("invalid thresholds t0={t0} t1={t1} t2={t2}: {reason}")]
    InvalidThresholds { t0: f64, t1: f64, t2: f64, reason: String },

    #[error("failed to parse {what}: {detail}")]
    Parse { what: String, detail: String },

    #[error("no valid pixels: the raster is entirely nodata")]
    AllNodata,

    #[error("no overlap: every pixel is nodata in at least one of the two rasters")]
    NoOverlap,

    #[error("empty statistics: {0}")]
    EmptyStats(String),

    #[error("cannot invert index target {target}: {detail}")]
    UninvertibleTarget { target: f64, detail: String },

    #[error("scene fractions sum to {actual} pixels but the grid holds {expected}")]
    CountMismatch { expected: u64, actual: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
