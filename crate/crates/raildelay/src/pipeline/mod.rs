//! Batch pipeline: the seven commands behind the `raildelay` CLI, run
//! manifests, report tables, and the GeoJSON map export.

mod commands;
mod geojson;
mod manifest;
mod report;

pub use commands::{
    cmd_evaluate, cmd_export_geo, cmd_generate, cmd_report, cmd_select, cmd_simulate, cmd_train,
    read_eval_rows, read_selection, resolve_seed, select_best, EvalRow, EvaluateOutput,
    ExportGeoOutput, GenerateOutput, ReportKind, ReportOutput, SelectOutput, SelectionRow,
    SelectionTable, SimulateOutput, TrainOutput, SEED_ENV_VAR,
};
pub use geojson::export_geojson;
pub use manifest::{sha256_hex, RunManifest};
pub use report::{
    reliability_report, render_reliability, render_summary, summary_report, CriticalRow,
    SummaryRow,
};

use crate::data::DataError;
use crate::metrics::MetricsError;
use crate::ml::MlError;
use crate::sim::SimError;
use thiserror::Error;

/// Pipeline failures, split by exit-code class: input problems exit 2,
/// internal defects exit 3.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Input(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> u8 {
        match self {
            PipelineError::Input(_) => 2,
            PipelineError::Internal(_) => 3,
        }
    }

    pub fn input(err: impl std::fmt::Display) -> Self {
        PipelineError::Input(err.to_string())
    }
}

impl From<DataError> for PipelineError {
    fn from(err: DataError) -> Self {
        PipelineError::Input(err.to_string())
    }
}

impl From<SimError> for PipelineError {
    fn from(err: SimError) -> Self {
        PipelineError::Input(err.to_string())
    }
}

impl From<MlError> for PipelineError {
    fn from(err: MlError) -> Self {
        PipelineError::Input(err.to_string())
    }
}

impl From<MetricsError> for PipelineError {
    fn from(err: MetricsError) -> Self {
        PipelineError::Input(err.to_string())
    }
}

impl From<std::io::Error> for PipelineError {
    fn from(err: std::io::Error) -> Self {
        PipelineError::Input(format!("io: {err}"))
    }
}
