//! Railway cellular delay toolkit: simulate dual-mode (Best Quality /
//! Packet Replication) measurement campaigns over synthetic LTE
//! networks, train regression-tree ensembles that predict PR-mode delays
//! from radio KPIs and train speed, and produce reliability tables,
//! regional statistics, and map exports.

pub mod data;
pub mod metrics;
pub mod ml;
pub mod pipeline;
pub mod sim;

pub use data::{Dataset, DelayKind, FeatureMatrix, MeasurementRecord, Mode, OperatorKpi};
pub use metrics::{MetricsReport, SummaryStats};
pub use ml::{ModelPreset, TrainedModel};
pub use sim::ScenarioConfig;
