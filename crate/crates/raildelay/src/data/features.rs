//! Feature-matrix assembly for supervised delay regression.
//!
//! The canonical model input is the nine KPI columns of the three
//! operators followed by train speed. Records missing any KPI triple are
//! excluded from assembly.

use super::types::{Dataset, DelayKind};
use super::DataError;

/// Width of the canonical feature matrix.
pub const FEATURE_COUNT: usize = 10;

/// Canonical column order, identical across all pipeline stages.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "op1_rsrp", "op1_rsrq", "op1_snr", "op2_rsrp", "op2_rsrq", "op2_snr", "op3_rsrp", "op3_rsrq",
    "op3_snr", "speed_kmh",
];

/// Dense row-major matrix with named columns. The canonical matrix has
/// [`FEATURE_COUNT`] columns; tests may build narrower ones.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    columns: Vec<String>,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(columns: Vec<String>) -> Self {
        assert!(!columns.is_empty(), "feature matrix needs columns");
        Self {
            columns,
            data: Vec::new(),
        }
    }

    /// Matrix with the canonical 10-column layout.
    pub fn standard() -> Self {
        Self::new(FEATURE_NAMES.iter().map(|s| s.to_string()).collect())
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.data.extend_from_slice(row);
    }

    pub fn n_rows(&self) -> usize {
        self.data.len() / self.columns.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.columns.len();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn column_names(&self) -> &[String] {
        &self.columns
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.columns.len() + col]
    }

    pub fn set_value(&mut self, row: usize, col: usize, v: f64) {
        let w = self.columns.len();
        self.data[row * w + col] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.columns.len())
    }

    /// New matrix holding the given rows (with repetition allowed), in order.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        let mut out = FeatureMatrix::new(self.columns.clone());
        for &i in indices {
            out.push_row(self.row(i));
        }
        out
    }
}

/// Aligned model inputs assembled from a dataset for one delay kind.
#[derive(Debug, Clone)]
pub struct FeatureExtraction {
    pub features: FeatureMatrix,
    /// Delay of the requested kind per feature row, ms.
    pub targets: Vec<f64>,
    /// Index of the source record behind each feature row.
    pub row_index: Vec<usize>,
}

/// Assemble the feature matrix and target vector for one delay kind.
///
/// One row per record that carries a delay of `kind` and a complete KPI
/// set; rows with missing KPIs are dropped.
pub fn to_features(dataset: &Dataset, kind: DelayKind) -> Result<FeatureExtraction, DataError> {
    if dataset.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let mut features = FeatureMatrix::standard();
    let mut targets = Vec::new();
    let mut row_index = Vec::new();

    for (i, record) in dataset.iter().enumerate() {
        let Some(target) = record.delays.get(kind) else {
            continue;
        };
        if !record.has_complete_kpis() {
            continue;
        }
        let mut row = [0.0f64; FEATURE_COUNT];
        for (op, kpi) in record.kpis.iter().enumerate() {
            let kpi = kpi.expect("checked complete");
            row[op * 3] = kpi.rsrp;
            row[op * 3 + 1] = kpi.rsrq;
            row[op * 3 + 2] = kpi.snr;
        }
        row[9] = record.speed_kmh;
        features.push_row(&row);
        targets.push(target);
        row_index.push(i);
    }

    if targets.is_empty() {
        return Err(DataError::NoFeatureRows(kind));
    }
    Ok(FeatureExtraction {
        features,
        targets,
        row_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::types::{DelayValues, MeasurementRecord, Mode, OperatorKpi};
    use crate::data::Dataset;

    fn dataset_with_times(n: usize) -> Dataset {
        let mut ds = Dataset::new(Mode::PacketReplication);
        for t in 0..n {
            let kpi = |base: f64| OperatorKpi {
                rsrp: -80.0 - base,
                rsrq: -7.0,
                snr: 15.0,
            };
            let mut delays = DelayValues::new();
            delays.set(DelayKind::PositionReport, 50.0 + t as f64);
            delays.set(DelayKind::Tcp, 40.0 + t as f64);
            if DelayKind::MovementAuthority.sampled_at(t as f64) {
                delays.set(DelayKind::MovementAuthority, 90.0);
            }
            ds.push(MeasurementRecord {
                timestamp_s: t as f64,
                lat: 61.0,
                lon: 25.0,
                chainage_km: t as f64 * 0.04,
                speed_kmh: 100.0 + t as f64,
                kpis: [Some(kpi(0.0)), Some(kpi(5.0)), Some(kpi(10.0))],
                delays,
                mode: Mode::PacketReplication,
            })
            .unwrap();
        }
        ds
    }

    #[test]
    fn ma_yields_one_row_per_ten_seconds() {
        let ds = dataset_with_times(10);
        let fx = to_features(&ds, DelayKind::MovementAuthority).unwrap();
        assert_eq!(fx.features.n_rows(), 1);
        assert_eq!(fx.row_index, vec![0]);
    }

    #[test]
    fn tcp_yields_all_rows_with_speed_in_last_column() {
        let ds = dataset_with_times(10);
        let fx = to_features(&ds, DelayKind::Tcp).unwrap();
        assert_eq!(fx.features.n_rows(), 10);
        for (i, row) in fx.features.rows().enumerate() {
            assert_eq!(row[9], 100.0 + i as f64);
        }
        assert_eq!(fx.targets[3], 43.0);
    }

    #[test]
    fn http_target_passes_through_verbatim() {
        let mut ds = dataset_with_times(1);
        let mut record = ds.records()[0].clone();
        record.timestamp_s = 1.0;
        record.delays = DelayValues::new();
        record.delays.set(DelayKind::Http, 31569.19);
        let mut ds2 = Dataset::new(Mode::PacketReplication);
        ds2.push(ds.records()[0].clone()).unwrap();
        ds2.push(record).unwrap();
        ds = ds2;
        let fx = to_features(&ds, DelayKind::Http).unwrap();
        assert_eq!(fx.targets, vec![31569.19]);
        assert_eq!(fx.row_index, vec![1]);
    }

    #[test]
    fn rows_missing_kpis_are_dropped() {
        let mut ds = dataset_with_times(3);
        let mut records: Vec<_> = ds.records().to_vec();
        records[1].kpis[2] = None;
        ds = Dataset::from_records(Mode::PacketReplication, records).unwrap();
        let fx = to_features(&ds, DelayKind::Tcp).unwrap();
        assert_eq!(fx.features.n_rows(), 2);
        assert_eq!(fx.row_index, vec![0, 2]);
    }

    #[test]
    fn zero_selected_rows_is_an_error() {
        let mut ds = dataset_with_times(3);
        let records: Vec<_> = ds
            .records()
            .iter()
            .map(|r| {
                let mut r = r.clone();
                let mut delays = DelayValues::new();
                if let Some(ma) = r.delays.get(DelayKind::MovementAuthority) {
                    delays.set(DelayKind::MovementAuthority, ma);
                }
                delays.set(DelayKind::PositionReport, 50.0);
                r.delays = delays;
                r
            })
            .collect();
        ds = Dataset::from_records(Mode::PacketReplication, records).unwrap();
        let err = to_features(&ds, DelayKind::Dns).unwrap_err();
        assert!(matches!(err, DataError::NoFeatureRows(DelayKind::Dns)));
    }

    #[test]
    fn column_names_are_fixed() {
        let fx = to_features(&dataset_with_times(2), DelayKind::Tcp).unwrap();
        assert_eq!(fx.features.column_names().len(), FEATURE_COUNT);
        assert_eq!(fx.features.column_names()[0], "op1_rsrp");
        assert_eq!(fx.features.column_names()[9], "speed_kmh");
    }
}
