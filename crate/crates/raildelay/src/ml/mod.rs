//! Regression-tree ensembles for delay modeling: a bagged forest and
//! three gradient-boosted variants, plus permutation importance and a
//! versioned binary model format.

mod boost;
mod forest;
mod importance;
mod model;
mod tree;

pub use boost::{fit_boosted, staged_training_rmse, BoostConfig};
pub use forest::{fit_forest, ForestConfig};
pub use importance::permutation_importance;
pub use model::{train_preset, Ensemble, ModelMetadata, ModelPreset, TrainedModel, MODEL_FORMAT_VERSION};
pub use tree::{fit_tree, Growth, Node, RegressionTree, TreeConfig};

use crate::metrics::MetricsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MlError {
    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("feature matrix has {x_rows} rows but target vector has {y_len}")]
    LengthMismatch { x_rows: usize, y_len: usize },

    #[error("at least {needed} training rows required, found {found}")]
    TooFewRows { needed: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("feature columns do not match training metadata (expected {expected:?})")]
    ColumnMismatch { expected: Vec<String> },

    #[error("unknown model preset '{0}'")]
    UnknownPreset(String),

    #[error("model format: bad magic bytes")]
    BadMagic,

    #[error("model format: unsupported version {0}")]
    UnsupportedVersion(u16),

    #[error("model format: unexpected end of stream")]
    Truncated,

    #[error("model format: invalid {what} tag {value}")]
    InvalidTag { what: &'static str, value: u8 },

    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Derive an independent stream seed from a base seed and an index
/// (splitmix64 finalizer). Keeps per-tree and per-permutation RNGs
/// decorrelated and independent of execution order.
pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
