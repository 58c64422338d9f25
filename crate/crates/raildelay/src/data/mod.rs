//! Measurement data model, CSV persistence, feature assembly, and
//! dataset splitting.

mod csv;
mod features;
mod split;
mod types;

pub use csv::{parse_csv, to_csv_string, write_csv, CSV_HEADER};
pub use features::{to_features, FeatureExtraction, FeatureMatrix, FEATURE_COUNT, FEATURE_NAMES};
pub use split::{region_split, time_split, DEFAULT_BOUNDARY_LON, DEFAULT_TRAIN_FRACTION};
pub use types::{
    Dataset, DelayKind, DelayValues, MeasurementRecord, Mode, OperatorKpi, OPERATOR_COUNT,
    RSRP_RANGE, RSRQ_RANGE, SNR_RANGE,
};

use thiserror::Error;

/// Errors produced by parsing, validation, and dataset operations.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("non-monotonic timestamp at line {0}")]
    NonMonotonicTimestamp(usize),

    #[error("line {line}: {reason}")]
    InvalidRow { line: usize, reason: String },

    #[error("unknown mode string '{0}'")]
    UnknownMode(String),

    #[error("unknown delay kind '{0}'")]
    UnknownDelayKind(String),

    #[error("record {index}: {reason}")]
    InvalidRecord { index: usize, reason: String },

    #[error("record {index} breaks strictly-increasing timestamp order")]
    OutOfOrder { index: usize },

    #[error("mode mismatch at record {index}: dataset is {expected}, record is {found}")]
    ModeMismatch {
        expected: Mode,
        found: Mode,
        index: usize,
    },

    #[error("csv header mismatch: expected '{expected}'")]
    HeaderMismatch { expected: &'static str },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("no records carry a {0} delay with complete KPIs")]
    NoFeatureRows(DelayKind),

    #[error("dataset has {0} records; at least 2 required to split")]
    TooFewRecords(usize),

    #[error("train fraction {0} outside (0, 1)")]
    InvalidFraction(f64),

    #[error("boundary longitude {0} outside [-180, 180]")]
    InvalidBoundary(f64),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
