//! GeoJSON export of per-sample delays for map rendering: sub-threshold
//! points carry a quintile bucket for light-to-dark styling, critical
//! points a flag for highlighting.

use serde_json::{json, Value};

use crate::data::{Dataset, DelayKind};
use crate::pipeline::PipelineError;

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    let w = rank - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Build a GeoJSON FeatureCollection of Point features for one delay
/// kind. Coordinates are `[lon, lat]`; properties carry the delay, the
/// strict-threshold critical flag, and a 0..=4 quintile bucket over the
/// sub-threshold delays (null for critical points).
pub fn export_geojson(dataset: &Dataset, kind: DelayKind) -> Result<Value, PipelineError> {
    let threshold = kind.critical_threshold_ms();
    let mut sub_threshold: Vec<f64> = dataset
        .delays_of(kind)
        .into_iter()
        .filter(|v| *v <= threshold)
        .collect();
    sub_threshold.sort_by(|a, b| a.total_cmp(b));
    if dataset.delays_of(kind).is_empty() {
        return Err(PipelineError::Input(format!(
            "dataset carries no {} delays",
            kind.slug()
        )));
    }
    let boundaries: Option<[f64; 4]> = if sub_threshold.is_empty() {
        None
    } else {
        Some([
            quantile_sorted(&sub_threshold, 0.2),
            quantile_sorted(&sub_threshold, 0.4),
            quantile_sorted(&sub_threshold, 0.6),
            quantile_sorted(&sub_threshold, 0.8),
        ])
    };

    let mut features = Vec::new();
    for record in dataset.iter() {
        let Some(delay_ms) = record.delays.get(kind) else {
            continue;
        };
        let critical = delay_ms > threshold;
        let bucket: Value = if critical {
            Value::Null
        } else {
            let bounds = boundaries.expect("sub-threshold values exist");
            let index = bounds.iter().filter(|b| delay_ms > **b).count();
            json!(index)
        };
        features.push(json!({
            "type": "Feature",
            "geometry": {
                "type": "Point",
                "coordinates": [record.lon, record.lat],
            },
            "properties": {
                "delay_ms": delay_ms,
                "delay_kind": kind.slug(),
                "mode": record.mode.tag(),
                "critical": critical,
                "bucket": bucket,
            },
        }));
    }

    Ok(json!({
        "type": "FeatureCollection",
        "features": features,
    }))
}
