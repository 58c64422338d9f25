//! Core measurement data model: delay kinds, per-operator radio KPIs,
//! routing modes, and timestamped measurement records.

use std::fmt;
use std::str::FromStr;

use super::DataError;

/// Number of mobile network operators measured in parallel.
pub const OPERATOR_COUNT: usize = 3;

/// The five delay types carried by a measurement record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DelayKind {
    PositionReport,
    MovementAuthority,
    Tcp,
    Http,
    Dns,
}

impl DelayKind {
    /// All kinds in canonical (CSV column) order.
    pub const ALL: [DelayKind; 5] = [
        DelayKind::PositionReport,
        DelayKind::MovementAuthority,
        DelayKind::Tcp,
        DelayKind::Http,
        DelayKind::Dns,
    ];

    /// Position of this kind in [`DelayKind::ALL`].
    pub fn index(self) -> usize {
        match self {
            DelayKind::PositionReport => 0,
            DelayKind::MovementAuthority => 1,
            DelayKind::Tcp => 2,
            DelayKind::Http => 3,
            DelayKind::Dns => 4,
        }
    }

    /// Sampling interval in seconds: 1 s everywhere except Movement
    /// Authority, which is sampled every 10 s.
    pub fn sampling_interval_s(self) -> f64 {
        match self {
            DelayKind::MovementAuthority => 10.0,
            _ => 1.0,
        }
    }

    /// Critical-delay threshold in ms: 500 ms, except 1000 ms for HTTP.
    pub fn critical_threshold_ms(self) -> f64 {
        match self {
            DelayKind::Http => 1000.0,
            _ => 500.0,
        }
    }

    /// Whether this kind is sampled at integer timestamp `t_s`.
    pub fn sampled_at(self, t_s: f64) -> bool {
        let interval = self.sampling_interval_s();
        let rem = t_s.rem_euclid(interval);
        rem.abs() < 1e-9 || (interval - rem).abs() < 1e-9
    }

    /// Short machine-readable name, used in CLI flags and file names.
    pub fn slug(self) -> &'static str {
        match self {
            DelayKind::PositionReport => "position",
            DelayKind::MovementAuthority => "ma",
            DelayKind::Tcp => "tcp",
            DelayKind::Http => "http",
            DelayKind::Dns => "dns",
        }
    }

    /// Human-readable name, used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            DelayKind::PositionReport => "Position Report",
            DelayKind::MovementAuthority => "MA",
            DelayKind::Tcp => "TCP",
            DelayKind::Http => "HTTP",
            DelayKind::Dns => "DNS",
        }
    }
}

impl fmt::Display for DelayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for DelayKind {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "position" | "position_report" => Ok(DelayKind::PositionReport),
            "ma" | "movement_authority" => Ok(DelayKind::MovementAuthority),
            "tcp" => Ok(DelayKind::Tcp),
            "http" => Ok(DelayKind::Http),
            "dns" => Ok(DelayKind::Dns),
            other => Err(DataError::UnknownDelayKind(other.to_string())),
        }
    }
}

/// Signal-quality indicators reported by one operator at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorKpi {
    /// Reference Signal Received Power, dBm.
    pub rsrp: f64,
    /// Reference Signal Received Quality, dB.
    pub rsrq: f64,
    /// Signal-to-Noise Ratio, dB.
    pub snr: f64,
}

/// Valid LTE reporting ranges; out-of-range values are ingest errors.
pub const RSRP_RANGE: (f64, f64) = (-140.0, -40.0);
pub const RSRQ_RANGE: (f64, f64) = (-20.0, -3.0);
pub const SNR_RANGE: (f64, f64) = (-10.0, 40.0);

impl OperatorKpi {
    /// Check all three indicators against their reporting ranges.
    pub fn validate(&self) -> Result<(), String> {
        for (name, value, (lo, hi)) in [
            ("rsrp", self.rsrp, RSRP_RANGE),
            ("rsrq", self.rsrq, RSRQ_RANGE),
            ("snr", self.snr, SNR_RANGE),
        ] {
            if !value.is_finite() || value < lo || value > hi {
                return Err(format!("{name} {value} outside [{lo}, {hi}]"));
            }
        }
        Ok(())
    }
}

/// Routing mode a dataset was measured (or generated) under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Strongest-signal routing reassessed every few seconds.
    BestQuality,
    /// Packet replication over all operators, first arrival kept.
    PacketReplication,
    /// Model-predicted PR-style delays for BQ-measured segments.
    GeneratedPr,
}

impl Mode {
    /// CSV tag for this mode.
    pub fn tag(self) -> &'static str {
        match self {
            Mode::BestQuality => "BQ",
            Mode::PacketReplication => "PR",
            Mode::GeneratedPr => "GEN_PR",
        }
    }

    /// Human-readable label used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Mode::BestQuality => "Best Quality",
            Mode::PacketReplication => "Measured PR",
            Mode::GeneratedPr => "Generated PR",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Mode {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "BQ" => Ok(Mode::BestQuality),
            "PR" => Ok(Mode::PacketReplication),
            "GEN_PR" => Ok(Mode::GeneratedPr),
            other => Err(DataError::UnknownMode(other.to_string())),
        }
    }
}

/// Partial map from delay kind to a measured delay in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DelayValues {
    values: [Option<f64>; 5],
}

impl DelayValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, kind: DelayKind) -> Option<f64> {
        self.values[kind.index()]
    }

    pub fn set(&mut self, kind: DelayKind, ms: f64) {
        self.values[kind.index()] = Some(ms);
    }

    pub fn contains(&self, kind: DelayKind) -> bool {
        self.values[kind.index()].is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(Option::is_none)
    }

    /// Present entries in canonical kind order.
    pub fn iter(&self) -> impl Iterator<Item = (DelayKind, f64)> + '_ {
        DelayKind::ALL
            .iter()
            .filter_map(|&kind| self.values[kind.index()].map(|ms| (kind, ms)))
    }
}

/// One timestamped sample of a measurement campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    /// Seconds since run start.
    pub timestamp_s: f64,
    /// WGS84 latitude, degrees.
    pub lat: f64,
    /// WGS84 longitude, degrees.
    pub lon: f64,
    /// Distance along the track, km.
    pub chainage_km: f64,
    /// Train speed, km/h.
    pub speed_kmh: f64,
    /// Per-operator KPIs; `None` marks an operator missing from the sample.
    pub kpis: [Option<OperatorKpi>; OPERATOR_COUNT],
    /// Delays observed at this sample, ms.
    pub delays: DelayValues,
    /// Routing mode the sample was collected under.
    pub mode: Mode,
}

impl MeasurementRecord {
    /// True when all three operators reported a KPI triple.
    pub fn has_complete_kpis(&self) -> bool {
        self.kpis.iter().all(Option::is_some)
    }

    /// Validate the per-record invariants. Errors carry a plain reason;
    /// callers attach location context (CSV line, record index).
    pub fn validate(&self) -> Result<(), String> {
        if !self.timestamp_s.is_finite() || self.timestamp_s < 0.0 {
            return Err(format!("invalid timestamp {}", self.timestamp_s));
        }
        if !self.speed_kmh.is_finite() || self.speed_kmh < 0.0 {
            return Err(format!("negative speed {}", self.speed_kmh));
        }
        for value in [self.lat, self.lon, self.chainage_km] {
            if !value.is_finite() {
                return Err("non-finite position field".to_string());
            }
        }
        for (op, kpi) in self.kpis.iter().enumerate() {
            if let Some(kpi) = kpi {
                kpi.validate()
                    .map_err(|reason| format!("op{} {reason}", op + 1))?;
            }
        }
        for (kind, ms) in self.delays.iter() {
            if !ms.is_finite() || ms <= 0.0 {
                return Err(format!("non-positive {} delay {ms}", kind.slug()));
            }
        }
        let ma_expected = DelayKind::MovementAuthority.sampled_at(self.timestamp_s);
        let ma_present = self.delays.contains(DelayKind::MovementAuthority);
        if ma_present && !ma_expected {
            return Err(format!(
                "ma delay present at timestamp {} (sampled every 10 s)",
                self.timestamp_s
            ));
        }
        if !ma_present && ma_expected {
            return Err(format!(
                "ma delay missing at timestamp {} (sampled every 10 s)",
                self.timestamp_s
            ));
        }
        Ok(())
    }
}

/// An ordered, mode-homogeneous collection of measurement records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<MeasurementRecord>,
    mode: Mode,
}

impl Dataset {
    pub fn new(mode: Mode) -> Self {
        Self {
            records: Vec::new(),
            mode,
        }
    }

    /// Build a dataset from records, enforcing ordering, mode homogeneity,
    /// and per-record invariants.
    pub fn from_records(
        mode: Mode,
        records: Vec<MeasurementRecord>,
    ) -> Result<Self, DataError> {
        let mut dataset = Self::new(mode);
        for record in records {
            dataset.push(record)?;
        }
        Ok(dataset)
    }

    /// Append a record, enforcing all invariants.
    pub fn push(&mut self, record: MeasurementRecord) -> Result<(), DataError> {
        let index = self.records.len();
        if record.mode != self.mode {
            return Err(DataError::ModeMismatch {
                expected: self.mode,
                found: record.mode,
                index,
            });
        }
        record
            .validate()
            .map_err(|reason| DataError::InvalidRecord { index, reason })?;
        if let Some(last) = self.records.last() {
            if record.timestamp_s <= last.timestamp_s {
                return Err(DataError::OutOfOrder { index });
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MeasurementRecord> {
        self.records.iter()
    }

    /// All delays of one kind, in record order.
    pub fn delays_of(&self, kind: DelayKind) -> Vec<f64> {
        self.records
            .iter()
            .filter_map(|r| r.delays.get(kind))
            .collect()
    }

    /// Internal constructor for subsequences that already satisfy the
    /// invariants (splits of a validated dataset).
    pub(crate) fn from_validated(mode: Mode, records: Vec<MeasurementRecord>) -> Self {
        Self { records, mode }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kpi() -> OperatorKpi {
        OperatorKpi {
            rsrp: -90.0,
            rsrq: -8.0,
            snr: 10.0,
        }
    }

    pub(crate) fn record_at(t: f64, mode: Mode) -> MeasurementRecord {
        let mut delays = DelayValues::new();
        delays.set(DelayKind::PositionReport, 50.0);
        if DelayKind::MovementAuthority.sampled_at(t) {
            delays.set(DelayKind::MovementAuthority, 80.0);
        }
        MeasurementRecord {
            timestamp_s: t,
            lat: 61.0,
            lon: 25.0,
            chainage_km: t * 0.04,
            speed_kmh: 144.0,
            kpis: [Some(kpi()), Some(kpi()), Some(kpi())],
            delays,
            mode,
        }
    }

    #[test]
    fn sampling_intervals_and_thresholds() {
        for kind in DelayKind::ALL {
            let want_interval = if kind == DelayKind::MovementAuthority {
                10.0
            } else {
                1.0
            };
            assert_eq!(kind.sampling_interval_s(), want_interval);
            let want_threshold = if kind == DelayKind::Http { 1000.0 } else { 500.0 };
            assert_eq!(kind.critical_threshold_ms(), want_threshold);
        }
    }

    #[test]
    fn ma_sampled_only_every_ten_seconds() {
        assert!(DelayKind::MovementAuthority.sampled_at(0.0));
        assert!(DelayKind::MovementAuthority.sampled_at(30.0));
        assert!(!DelayKind::MovementAuthority.sampled_at(3.0));
        assert!(DelayKind::Tcp.sampled_at(3.0));
    }

    #[test]
    fn kpi_range_validation() {
        let mut bad = kpi();
        bad.rsrp = -20.0;
        assert!(bad.rsrp > RSRP_RANGE.1);
        assert!(bad.validate().is_err());
        assert!(kpi().validate().is_ok());
    }

    #[test]
    fn push_rejects_out_of_order_and_equal_timestamps() {
        let mut ds = Dataset::new(Mode::PacketReplication);
        ds.push(record_at(5.0, Mode::PacketReplication)).unwrap();
        let err = ds
            .push(record_at(5.0, Mode::PacketReplication))
            .unwrap_err();
        assert!(matches!(err, DataError::OutOfOrder { index: 1 }));
    }

    #[test]
    fn push_rejects_mode_mismatch() {
        let mut ds = Dataset::new(Mode::BestQuality);
        let err = ds.push(record_at(0.0, Mode::PacketReplication)).unwrap_err();
        assert!(matches!(err, DataError::ModeMismatch { .. }));
    }

    #[test]
    fn record_validation_enforces_ma_schedule() {
        let mut r = record_at(3.0, Mode::PacketReplication);
        r.delays.set(DelayKind::MovementAuthority, 90.0);
        assert!(r.validate().is_err());

        let mut r = record_at(10.0, Mode::PacketReplication);
        r.delays = DelayValues::new();
        r.delays.set(DelayKind::Tcp, 40.0);
        assert!(r.validate().is_err());
    }

    #[test]
    fn record_validation_rejects_nonpositive_delay() {
        let mut r = record_at(1.0, Mode::PacketReplication);
        r.delays.set(DelayKind::Tcp, 0.0);
        assert!(r.validate().is_err());
    }

    #[test]
    fn mode_tags_round_trip() {
        for mode in [Mode::BestQuality, Mode::PacketReplication, Mode::GeneratedPr] {
            assert_eq!(mode.tag().parse::<Mode>().unwrap(), mode);
        }
        assert!("bq".parse::<Mode>().is_err());
    }
}
