//! CSV persistence for measurement datasets.
//!
//! Wire format: UTF-8, comma-separated, `.` decimal point, header row
//! required, empty field = absent value. Floats are written with Rust's
//! shortest exact representation, so `parse_csv(write_csv(d))`
//! reproduces `d` field-for-field.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::str::FromStr;

use super::types::{
    Dataset, DelayKind, DelayValues, MeasurementRecord, Mode, OperatorKpi, OPERATOR_COUNT,
};
use super::DataError;

/// Column layout, fixed across the toolchain.
pub const CSV_HEADER: &str = "timestamp_s,lat,lon,chainage_km,speed_kmh,\
op1_rsrp,op1_rsrq,op1_snr,op2_rsrp,op2_rsrq,op2_snr,op3_rsrp,op3_rsrq,op3_snr,\
mode,delay_position_ms,delay_ma_ms,delay_tcp_ms,delay_http_ms,delay_dns_ms";

const COLUMN_COUNT: usize = 20;

/// Parse a measurement dataset from a character stream.
pub fn parse_csv<R: Read>(reader: R) -> Result<Dataset, DataError> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or(DataError::HeaderMismatch {
            expected: CSV_HEADER,
        })?
        .map_err(DataError::Io)?;
    if header.trim_end_matches(['\r', '\n']) != CSV_HEADER {
        return Err(DataError::HeaderMismatch {
            expected: CSV_HEADER,
        });
    }

    let mut dataset: Option<Dataset> = None;
    for (i, line) in lines.enumerate() {
        let line_no = i + 2; // header is line 1
        let line = line.map_err(DataError::Io)?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let record = parse_row(line, line_no)?;

        let dataset = dataset.get_or_insert_with(|| Dataset::new(record.mode));
        if record.mode != dataset.mode() {
            return Err(DataError::InvalidRow {
                line: line_no,
                reason: format!(
                    "mode {} differs from dataset mode {}",
                    record.mode,
                    dataset.mode()
                ),
            });
        }
        dataset.push(record).map_err(|e| match e {
            DataError::OutOfOrder { .. } => DataError::NonMonotonicTimestamp(line_no),
            DataError::InvalidRecord { reason, .. } => DataError::InvalidRow {
                line: line_no,
                reason,
            },
            other => other,
        })?;
    }

    dataset.ok_or(DataError::EmptyDataset)
}

fn parse_row(line: &str, line_no: usize) -> Result<MeasurementRecord, DataError> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != COLUMN_COUNT {
        return Err(DataError::MalformedRow {
            line: line_no,
            reason: format!("expected {COLUMN_COUNT} fields, found {}", fields.len()),
        });
    }

    let required = |idx: usize, name: &str| -> Result<f64, DataError> {
        let raw = fields[idx];
        if raw.is_empty() {
            return Err(DataError::MalformedRow {
                line: line_no,
                reason: format!("{name} is empty"),
            });
        }
        f64::from_str(raw).map_err(|_| DataError::MalformedRow {
            line: line_no,
            reason: format!("{name} '{raw}' is not a number"),
        })
    };
    let optional = |idx: usize, name: &str| -> Result<Option<f64>, DataError> {
        let raw = fields[idx];
        if raw.is_empty() {
            return Ok(None);
        }
        f64::from_str(raw)
            .map(Some)
            .map_err(|_| DataError::MalformedRow {
                line: line_no,
                reason: format!("{name} '{raw}' is not a number"),
            })
    };

    let timestamp_s = required(0, "timestamp_s")?;
    let lat = required(1, "lat")?;
    let lon = required(2, "lon")?;
    let chainage_km = required(3, "chainage_km")?;
    let speed_kmh = required(4, "speed_kmh")?;

    let mut kpis: [Option<OperatorKpi>; OPERATOR_COUNT] = [None; OPERATOR_COUNT];
    for op in 0..OPERATOR_COUNT {
        let base = 5 + op * 3;
        let names = [
            format!("op{}_rsrp", op + 1),
            format!("op{}_rsrq", op + 1),
            format!("op{}_snr", op + 1),
        ];
        let rsrp = optional(base, &names[0])?;
        let rsrq = optional(base + 1, &names[1])?;
        let snr = optional(base + 2, &names[2])?;
        kpis[op] = match (rsrp, rsrq, snr) {
            (Some(rsrp), Some(rsrq), Some(snr)) => Some(OperatorKpi { rsrp, rsrq, snr }),
            (None, None, None) => None,
            _ => {
                return Err(DataError::MalformedRow {
                    line: line_no,
                    reason: format!("incomplete KPI triple for operator {}", op + 1),
                })
            }
        };
    }

    let mode = fields[14].parse::<Mode>().map_err(|_| DataError::InvalidRow {
        line: line_no,
        reason: format!("unknown mode string '{}'", fields[14]),
    })?;

    let mut delays = DelayValues::new();
    for (offset, kind) in DelayKind::ALL.iter().enumerate() {
        let name = format!("delay_{}_ms", kind.slug());
        if let Some(ms) = optional(15 + offset, &name)? {
            delays.set(*kind, ms);
        }
    }

    Ok(MeasurementRecord {
        timestamp_s,
        lat,
        lon,
        chainage_km,
        speed_kmh,
        kpis,
        delays,
        mode,
    })
}

/// Serialize a dataset to a writer; inverse of [`parse_csv`].
pub fn write_csv<W: Write>(dataset: &Dataset, writer: &mut W) -> io::Result<()> {
    writeln!(writer, "{CSV_HEADER}")?;
    for record in dataset.iter() {
        writeln!(writer, "{}", format_row(record))?;
    }
    Ok(())
}

/// Serialize a dataset to an in-memory string.
pub fn to_csv_string(dataset: &Dataset) -> String {
    let mut buf = Vec::new();
    write_csv(dataset, &mut buf).expect("in-memory write cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}

fn format_row(record: &MeasurementRecord) -> String {
    let mut fields: Vec<String> = Vec::with_capacity(COLUMN_COUNT);
    fields.push(record.timestamp_s.to_string());
    fields.push(record.lat.to_string());
    fields.push(record.lon.to_string());
    fields.push(record.chainage_km.to_string());
    fields.push(record.speed_kmh.to_string());
    for kpi in &record.kpis {
        match kpi {
            Some(kpi) => {
                fields.push(kpi.rsrp.to_string());
                fields.push(kpi.rsrq.to_string());
                fields.push(kpi.snr.to_string());
            }
            None => {
                fields.extend([String::new(), String::new(), String::new()]);
            }
        }
    }
    fields.push(record.mode.tag().to_string());
    for kind in DelayKind::ALL {
        fields.push(
            record
                .delays
                .get(kind)
                .map(|ms| ms.to_string())
                .unwrap_or_default(),
        );
    }
    fields.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pr_row(t: f64, ma: Option<f64>) -> String {
        let ma_field = ma.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{t},60.5,25.1,12.3,120,-85,-7.5,12,-90,-8,10,-100,-9.5,5,PR,55.2,{ma_field},40.1,80.5,45.9"
        )
    }

    #[test]
    fn parses_single_valid_pr_row() {
        let text = format!("{CSV_HEADER}\n{}\n", pr_row(0.0, Some(92.0)));
        let ds = parse_csv(text.as_bytes()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.mode(), Mode::PacketReplication);
        let r = &ds.records()[0];
        assert_eq!(r.delays.iter().count(), 5);
        assert_eq!(r.delays.get(DelayKind::Http), Some(80.5));
    }

    #[test]
    fn empty_ma_field_becomes_absent_entry() {
        let text = format!("{CSV_HEADER}\n{}\n", pr_row(3.0, None));
        let ds = parse_csv(text.as_bytes()).unwrap();
        assert!(!ds.records()[0].delays.contains(DelayKind::MovementAuthority));
    }

    #[test]
    fn duplicate_timestamp_reports_line_number() {
        let text = format!(
            "{CSV_HEADER}\n{}\n{}\n",
            pr_row(5.0, None),
            pr_row(5.0, None)
        );
        let err = parse_csv(text.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "non-monotonic timestamp at line 3");
    }

    #[test]
    fn out_of_range_kpi_is_an_ingest_error() {
        let row = "1,60.5,25.1,12.3,120,-30,-7.5,12,-90,-8,10,-100,-9.5,5,PR,55.2,,40.1,80.5,45.9";
        let text = format!("{CSV_HEADER}\n{row}\n");
        let err = parse_csv(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("rsrp"), "{err}");
    }

    #[test]
    fn unknown_mode_string_is_rejected() {
        let row = "1,60.5,25.1,12.3,120,-85,-7.5,12,-90,-8,10,-100,-9.5,5,XX,55.2,,40.1,80.5,45.9";
        let text = format!("{CSV_HEADER}\n{row}\n");
        let err = parse_csv(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("unknown mode string 'XX'"), "{err}");
    }

    #[test]
    fn partial_kpi_triple_is_rejected() {
        let row = "1,60.5,25.1,12.3,120,-85,,12,-90,-8,10,-100,-9.5,5,PR,55.2,,40.1,80.5,45.9";
        let text = format!("{CSV_HEADER}\n{row}\n");
        let err = parse_csv(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("incomplete KPI"), "{err}");
    }

    #[test]
    fn empty_dataset_writes_header_only() {
        let ds = Dataset::new(Mode::BestQuality);
        assert_eq!(to_csv_string(&ds), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn single_record_round_trips_exactly() {
        let text = format!("{CSV_HEADER}\n{}\n", pr_row(0.0, Some(92.0)));
        let ds = parse_csv(text.as_bytes()).unwrap();
        let back = parse_csv(to_csv_string(&ds).as_bytes()).unwrap();
        assert_eq!(ds, back);
    }

    prop_compose! {
        fn arb_kpi()(
            rsrp in -140.0f64..=-40.0,
            rsrq in -20.0f64..=-3.0,
            snr in -10.0f64..=40.0,
        ) -> OperatorKpi {
            OperatorKpi { rsrp, rsrq, snr }
        }
    }

    prop_compose! {
        fn arb_record(t: f64)(
            lat in 59.0f64..66.0,
            lon in 21.0f64..30.0,
            chainage in 0.0f64..2000.0,
            speed in 0.0f64..250.0,
            kpis in prop::array::uniform3(prop::option::of(arb_kpi())),
            position in prop::option::of(0.1f64..5000.0),
            ma in 0.1f64..5000.0,
            tcp in prop::option::of(0.1f64..5000.0),
            http in prop::option::of(0.1f64..40000.0),
            dns in prop::option::of(0.1f64..5000.0),
        ) -> MeasurementRecord {
            let mut delays = DelayValues::new();
            if let Some(v) = position { delays.set(DelayKind::PositionReport, v); }
            if DelayKind::MovementAuthority.sampled_at(t) {
                delays.set(DelayKind::MovementAuthority, ma);
            }
            if let Some(v) = tcp { delays.set(DelayKind::Tcp, v); }
            if let Some(v) = http { delays.set(DelayKind::Http, v); }
            if let Some(v) = dns { delays.set(DelayKind::Dns, v); }
            MeasurementRecord {
                timestamp_s: t,
                lat,
                lon,
                chainage_km: chainage,
                speed_kmh: speed,
                kpis,
                delays,
                mode: Mode::PacketReplication,
            }
        }
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        prop::collection::vec(any::<bool>(), 1..60).prop_flat_map(|mask| {
            let times: Vec<f64> = mask
                .iter()
                .enumerate()
                .filter(|(_, keep)| **keep)
                .map(|(i, _)| i as f64)
                .collect();
            let times = if times.is_empty() { vec![0.0] } else { times };
            times
                .into_iter()
                .map(arb_record)
                .collect::<Vec<_>>()
                .prop_map(|records| {
                    Dataset::from_records(Mode::PacketReplication, records).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn csv_round_trip_identity(ds in arb_dataset()) {
            let text = to_csv_string(&ds);
            let back = parse_csv(text.as_bytes()).unwrap();
            prop_assert_eq!(ds, back);
        }
    }
}
