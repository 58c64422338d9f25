//! Chronological and regional dataset splits.

use super::types::Dataset;
use super::DataError;

/// Default chronological train fraction.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

/// Default east/west boundary longitude, degrees east.
pub const DEFAULT_BOUNDARY_LON: f64 = 25.5;

/// Split chronologically: train = first `ceil(n * fraction)` records,
/// test = remainder. No shuffling, so no temporal leakage.
pub fn time_split(dataset: &Dataset, train_fraction: f64) -> Result<(Dataset, Dataset), DataError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DataError::InvalidFraction(train_fraction));
    }
    let n = dataset.len();
    if n < 2 {
        return Err(DataError::TooFewRecords(n));
    }
    let train_len = ((n as f64 * train_fraction).ceil() as usize).min(n);
    let (train, test) = dataset.records().split_at(train_len);
    Ok((
        Dataset::from_validated(dataset.mode(), train.to_vec()),
        Dataset::from_validated(dataset.mode(), test.to_vec()),
    ))
}

/// Split by longitude: east = records at `lon >= boundary_lon`, west =
/// remainder. Both halves preserve record order.
pub fn region_split(
    dataset: &Dataset,
    boundary_lon: f64,
) -> Result<(Dataset, Dataset), DataError> {
    if !(-180.0..=180.0).contains(&boundary_lon) {
        return Err(DataError::InvalidBoundary(boundary_lon));
    }
    let (east, west): (Vec<_>, Vec<_>) = dataset
        .records()
        .iter()
        .cloned()
        .partition(|r| r.lon >= boundary_lon);
    Ok((
        Dataset::from_validated(dataset.mode(), east),
        Dataset::from_validated(dataset.mode(), west),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::types::{DelayKind, DelayValues, MeasurementRecord, Mode, OperatorKpi};

    fn record(t: f64, lon: f64) -> MeasurementRecord {
        let kpi = OperatorKpi {
            rsrp: -90.0,
            rsrq: -8.0,
            snr: 10.0,
        };
        let mut delays = DelayValues::new();
        delays.set(DelayKind::Tcp, 40.0);
        if DelayKind::MovementAuthority.sampled_at(t) {
            delays.set(DelayKind::MovementAuthority, 90.0);
        }
        MeasurementRecord {
            timestamp_s: t,
            lat: 61.0,
            lon,
            chainage_km: t * 0.03,
            speed_kmh: 110.0,
            kpis: [Some(kpi), Some(kpi), Some(kpi)],
            delays,
            mode: Mode::PacketReplication,
        }
    }

    fn dataset(n: usize) -> Dataset {
        let records = (0..n).map(|t| record(t as f64, 25.0)).collect();
        Dataset::from_records(Mode::PacketReplication, records).unwrap()
    }

    #[test]
    fn seventy_thirty_split_of_ten() {
        let (train, test) = time_split(&dataset(10), 0.7).unwrap();
        assert_eq!(train.len(), 7);
        assert_eq!(test.len(), 3);
    }

    #[test]
    fn two_records_split_in_half() {
        let (train, test) = time_split(&dataset(2), 0.5).unwrap();
        assert_eq!((train.len(), test.len()), (1, 1));
    }

    #[test]
    fn split_is_chronological() {
        let (train, test) = time_split(&dataset(25), 0.4).unwrap();
        let max_train = train
            .records()
            .iter()
            .map(|r| r.timestamp_s)
            .fold(f64::MIN, f64::max);
        let min_test = test
            .records()
            .iter()
            .map(|r| r.timestamp_s)
            .fold(f64::MAX, f64::min);
        assert!(max_train < min_test);
    }

    #[test]
    fn rejects_tiny_dataset_and_bad_fraction() {
        assert!(time_split(&dataset(1), 0.5).is_err());
        assert!(time_split(&dataset(10), 0.0).is_err());
        assert!(time_split(&dataset(10), 1.0).is_err());
    }

    #[test]
    fn region_split_on_boundary() {
        let records = vec![record(0.0, 24.0), record(1.0, 28.0)];
        let ds = Dataset::from_records(Mode::PacketReplication, records).unwrap();
        let (east, west) = region_split(&ds, 26.0).unwrap();
        assert_eq!(east.len(), 1);
        assert_eq!(east.records()[0].lon, 28.0);
        assert_eq!(west.records()[0].lon, 24.0);
    }

    #[test]
    fn region_split_can_leave_west_empty() {
        let records = vec![record(0.0, 27.0), record(1.0, 28.0)];
        let ds = Dataset::from_records(Mode::PacketReplication, records).unwrap();
        let (east, west) = region_split(&ds, 25.5).unwrap();
        assert_eq!(east.len(), 2);
        assert!(west.is_empty());
    }

    #[test]
    fn splits_partition_the_input() {
        let ds = dataset(31);
        let (train, test) = time_split(&ds, 0.61).unwrap();
        assert_eq!(train.len() + test.len(), ds.len());
        let (east, west) = region_split(&ds, 25.5).unwrap();
        assert_eq!(east.len() + west.len(), ds.len());
    }
}
