//! Reliability and statistical-summary report tables.

use crate::data::{Dataset, DelayKind};
use crate::metrics::{critical_count, summary, SummaryStats};
use crate::pipeline::PipelineError;

/// One row of the reliability table: critical events of one delay kind
/// in one dataset.
#[derive(Debug, Clone)]
pub struct CriticalRow {
    pub kind: DelayKind,
    pub mode_label: String,
    pub count: usize,
    pub percentage: f64,
}

/// Critical-event counts per delay kind for each dataset, at each kind's
/// own threshold.
pub fn reliability_report(datasets: &[Dataset]) -> Result<Vec<CriticalRow>, PipelineError> {
    let mut rows = Vec::new();
    for kind in DelayKind::ALL {
        for dataset in datasets {
            let values = dataset.delays_of(kind);
            if values.is_empty() {
                continue;
            }
            let (count, percentage) = critical_count(&values, kind.critical_threshold_ms())?;
            rows.push(CriticalRow {
                kind,
                mode_label: dataset.mode().display_name().to_string(),
                count,
                percentage,
            });
        }
    }
    if rows.is_empty() {
        return Err(PipelineError::Input(
            "no delay values found in the given datasets".into(),
        ));
    }
    Ok(rows)
}

/// One summary row: the six-number statistics of one delay kind within
/// one labelled slice of the data.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub kind: DelayKind,
    /// Mode label, optionally with a region suffix.
    pub label: String,
    pub stats: SummaryStats,
    pub n: usize,
}

/// Six-number summaries per delay kind for each labelled dataset slice.
pub fn summary_report(slices: &[(String, &Dataset)]) -> Result<Vec<SummaryRow>, PipelineError> {
    let mut rows = Vec::new();
    for kind in DelayKind::ALL {
        for (label, dataset) in slices {
            let values = dataset.delays_of(kind);
            if values.is_empty() {
                continue;
            }
            rows.push(SummaryRow {
                kind,
                label: label.clone(),
                stats: summary(&values)?,
                n: values.len(),
            });
        }
    }
    if rows.is_empty() {
        return Err(PipelineError::Input(
            "no delay values found in the given datasets".into(),
        ));
    }
    Ok(rows)
}

fn fmt_option(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "n/a".into())
}

/// Render the reliability rows as an aligned text table.
pub fn render_reliability(rows: &[CriticalRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<16} {:<14} {:>8} {:>12}\n",
        "Delay", "Mode", "Count", "Percentage"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<16} {:<14} {:>8} {:>11.3}%\n",
            row.kind.display_name(),
            row.mode_label,
            row.count,
            row.percentage
        ));
    }
    out
}

/// Render summary rows as an aligned text table (Mean first, matching
/// the regional-statistics layout).
pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<16} {:<20} {:>10} {:>10} {:>10} {:>10} {:>10} {:>12}\n",
        "Delay", "Slice", "Mean", "Min", "25%", "50%", "75%", "Max"
    ));
    for row in rows {
        let s = &row.stats;
        out.push_str(&format!(
            "{:<16} {:<20} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>12.2}\n",
            row.kind.display_name(),
            row.label,
            s.mean,
            s.min,
            s.q25,
            s.median,
            s.q75,
            s.max
        ));
    }
    out
}

/// Render the evaluation metrics of one preset as one text line.
pub fn render_metric_line(name: &str, values: &[Option<f64>]) -> String {
    let cells: Vec<String> = values.iter().map(|v| format!("{:>12}", fmt_option(*v))).collect();
    format!("  {:<10} {}", name, cells.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DelayValues, MeasurementRecord, Mode, OperatorKpi};

    fn dataset(mode: Mode, tcp_values: &[f64]) -> Dataset {
        let kpi = OperatorKpi {
            rsrp: -90.0,
            rsrq: -8.0,
            snr: 10.0,
        };
        let records = tcp_values
            .iter()
            .enumerate()
            .map(|(t, v)| {
                let mut delays = DelayValues::new();
                delays.set(DelayKind::Tcp, *v);
                if DelayKind::MovementAuthority.sampled_at(t as f64) {
                    delays.set(DelayKind::MovementAuthority, 90.0);
                }
                MeasurementRecord {
                    timestamp_s: t as f64,
                    lat: 61.0,
                    lon: 25.0,
                    chainage_km: 0.0,
                    speed_kmh: 100.0,
                    kpis: [Some(kpi), Some(kpi), Some(kpi)],
                    delays,
                    mode,
                }
            })
            .collect();
        Dataset::from_records(mode, records).unwrap()
    }

    #[test]
    fn reliability_counts_per_mode() {
        let bq = dataset(Mode::BestQuality, &[100.0, 700.0, 800.0, 90.0]);
        let pr = dataset(Mode::PacketReplication, &[100.0, 90.0, 80.0, 70.0]);
        let rows = reliability_report(&[bq, pr]).unwrap();
        let tcp_rows: Vec<_> = rows.iter().filter(|r| r.kind == DelayKind::Tcp).collect();
        assert_eq!(tcp_rows.len(), 2);
        assert_eq!(tcp_rows[0].mode_label, "Best Quality");
        assert_eq!(tcp_rows[0].count, 2);
        assert_eq!(tcp_rows[0].percentage, 50.0);
        assert_eq!(tcp_rows[1].count, 0);
    }

    #[test]
    fn summary_of_single_record_collapses() {
        let pr = dataset(Mode::PacketReplication, &[42.0]);
        let rows = summary_report(&[("Measured PR".to_string(), &pr)]).unwrap();
        let tcp = rows.iter().find(|r| r.kind == DelayKind::Tcp).unwrap();
        let s = tcp.stats;
        assert_eq!(
            (s.min, s.q25, s.median, s.mean, s.q75, s.max),
            (42.0, 42.0, 42.0, 42.0, 42.0, 42.0)
        );
    }

    #[test]
    fn rendered_reliability_has_table_two_columns() {
        let bq = dataset(Mode::BestQuality, &[100.0, 700.0]);
        let rows = reliability_report(&[bq]).unwrap();
        let text = render_reliability(&rows);
        let header = text.lines().next().unwrap();
        for column in ["Delay", "Mode", "Count", "Percentage"] {
            assert!(header.contains(column), "{header}");
        }
    }

    #[test]
    fn rendered_summary_has_regional_columns() {
        let pr = dataset(Mode::PacketReplication, &[10.0, 20.0, 30.0]);
        let rows = summary_report(&[("East".to_string(), &pr)]).unwrap();
        let text = render_summary(&rows);
        let header = text.lines().next().unwrap();
        for column in ["Mean", "Min", "25%", "50%", "75%", "Max"] {
            assert!(header.contains(column), "{header}");
        }
    }
}
