//! Synthetic measurement-campaign generator: train movement over a
//! track, per-operator radio propagation with correlated shadowing and
//! handover spikes, and the BQ/PR routing disciplines evaluated over a
//! common random realization.

mod geometry;
mod radio;
mod routing;
mod run;
mod scenario;

pub use geometry::{haversine_m, SpeedSegment, Track, TrainRun};
pub use radio::{
    derive_rsrq, derive_snr, link_delay, path_rsrp, quality_penalty, speed_penalty,
    update_serving, LinkState, ShadowingState, JITTER_SIGMA, PATH_LOSS_EXPONENT,
    REFERENCE_DISTANCE_M,
};
pub use routing::{route_pr, BqRouter};
pub use run::{simulate, simulate_traced, LinkSample, SimOutput};
pub use scenario::{
    parse_scenario_file, write_scenario_file, CellSite, DelayOffsets, OperatorNetwork,
    ScenarioConfig,
};

use crate::data::DataError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config line {line}: {reason}")]
    ConfigParse { line: usize, reason: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("track needs at least 2 vertices, found {0}")]
    TrackTooShort(usize),

    #[error("track vertices {0} and {1} coincide")]
    DegenerateSegment(usize, usize),

    #[error("run starts at {start_km} km but the track ends at {track_km} km")]
    RunBeyondTrack { start_km: f64, track_km: f64 },

    #[error(transparent)]
    Data(#[from] DataError),
}
