//! Regression and reliability metrics: RMSE, R², MAE, precision/recall
//! at a critical threshold, distribution summaries, and critical-event
//! counts.
//!
//! Criticality is strict: a value is critical only when it *exceeds* the
//! threshold. Precision and recall with an empty denominator are
//! reported as undefined (`None`), never silently 0 or 1.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: {actual} actual vs {predicted} predicted")]
    LengthMismatch { actual: usize, predicted: usize },

    #[error("empty input")]
    Empty,
}

/// One model's evaluation on one delay dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub rmse: f64,
    /// `None` when the actual values have zero variance.
    pub r2: Option<f64>,
    pub mae: f64,
    /// `None` when nothing was predicted critical.
    pub precision: Option<f64>,
    /// `None` when nothing was actually critical.
    pub recall: Option<f64>,
    /// Critical threshold the classification metrics used, ms.
    pub threshold_ms: f64,
}

/// Six-number distribution summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub mean: f64,
    pub q75: f64,
    pub max: f64,
}

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<(), MetricsError> {
    if actual.len() != predicted.len() {
        return Err(MetricsError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

/// Root mean squared error.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    check_pair(actual, predicted)?;
    let sum_sq: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok((sum_sq / actual.len() as f64).sqrt())
}

/// Mean absolute error.
pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    check_pair(actual, predicted)?;
    let sum_abs: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).abs()).sum();
    Ok(sum_abs / actual.len() as f64)
}

/// Coefficient of determination, `1 - SS_res / SS_tot`. Returns `None`
/// when the actual values have zero variance.
pub fn r2(actual: &[f64], predicted: &[f64]) -> Result<Option<f64>, MetricsError> {
    check_pair(actual, predicted)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean) * (a - mean)).sum();
    if ss_tot == 0.0 {
        return Ok(None);
    }
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok(Some(1.0 - ss_res / ss_tot))
}

/// Precision and recall of critical-event detection at `threshold_ms`.
/// Positive means strictly greater than the threshold.
pub fn precision_recall(
    actual: &[f64],
    predicted: &[f64],
    threshold_ms: f64,
) -> Result<(Option<f64>, Option<f64>), MetricsError> {
    check_pair(actual, predicted)?;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (a, p) in actual.iter().zip(predicted) {
        let actual_pos = *a > threshold_ms;
        let predicted_pos = *p > threshold_ms;
        match (actual_pos, predicted_pos) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64);
    let recall = (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64);
    Ok((precision, recall))
}

/// Full evaluation of predictions against actuals at one threshold.
pub fn evaluate(
    actual: &[f64],
    predicted: &[f64],
    threshold_ms: f64,
) -> Result<MetricsReport, MetricsError> {
    let (precision, recall) = precision_recall(actual, predicted, threshold_ms)?;
    Ok(MetricsReport {
        rmse: rmse(actual, predicted)?,
        r2: r2(actual, predicted)?,
        mae: mae(actual, predicted)?,
        precision,
        recall,
        threshold_ms,
    })
}

/// Quantile by linear interpolation between order statistics: the
/// quantile at probability `p` sits at rank `p * (n - 1)`.
fn quantile(sorted: &[f64], p: f64) -> f64 {
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

/// Min, quartiles, median, mean, and max of a delay sample.
pub fn summary(values: &[f64]) -> Result<SummaryStats, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(SummaryStats {
        min: sorted[0],
        q25: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        mean: values.iter().sum::<f64>() / values.len() as f64,
        q75: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// Count of values strictly above the threshold and their share of the
/// sample in percent.
pub fn critical_count(values: &[f64], threshold_ms: f64) -> Result<(usize, f64), MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let count = values.iter().filter(|v| **v > threshold_ms).count();
    let percentage = 100.0 * count as f64 / values.len() as f64;
    Ok((count, percentage))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_of_perfect_prediction_is_zero() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn rmse_hand_value() {
        let value = rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert!((value - 12.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rmse_rejects_mismatch_and_empty() {
        assert!(matches!(
            rmse(&[1.0], &[1.0, 2.0]),
            Err(MetricsError::LengthMismatch { .. })
        ));
        assert!(matches!(rmse(&[], &[]), Err(MetricsError::Empty)));
    }

    #[test]
    fn mae_hand_value_and_bound() {
        assert_eq!(mae(&[1.0, 2.0], &[2.0, 4.0]).unwrap(), 1.5);
        let a = [3.0, 7.0, 1.0, 9.0];
        let p = [2.5, 8.0, 0.0, 11.0];
        assert!(mae(&a, &p).unwrap() <= rmse(&a, &p).unwrap());
    }

    #[test]
    fn r2_perfect_mean_and_negative() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(r2(&a, &a).unwrap(), Some(1.0));
        assert_eq!(r2(&a, &[2.0, 2.0, 2.0]).unwrap(), Some(0.0));
        assert_eq!(r2(&a, &[3.0, 2.0, 1.0]).unwrap(), Some(-3.0));
    }

    #[test]
    fn r2_zero_variance_is_undefined() {
        assert_eq!(r2(&[5.0, 5.0], &[4.0, 6.0]).unwrap(), None);
    }

    #[test]
    fn precision_recall_hand_case() {
        // criticals: actual at indices 2,3; predicted at 3,4.
        let actual = [0.0, 0.0, 600.0, 700.0, 0.0];
        let predicted = [0.0, 0.0, 0.0, 800.0, 900.0];
        let (p, r) = precision_recall(&actual, &predicted, 500.0).unwrap();
        assert_eq!(p, Some(0.5));
        assert_eq!(r, Some(0.5));
    }

    #[test]
    fn matching_critical_pattern_is_perfect() {
        let a = [600.0, 10.0, 700.0];
        let (p, r) = precision_recall(&a, &a, 500.0).unwrap();
        assert_eq!((p, r), (Some(1.0), Some(1.0)));
    }

    #[test]
    fn threshold_is_strict() {
        let (p, r) = precision_recall(&[500.0], &[500.0], 500.0).unwrap();
        assert_eq!((p, r), (None, None));
        assert_eq!(critical_count(&[500.0], 500.0).unwrap(), (0, 0.0));
    }

    #[test]
    fn no_positives_is_undefined_not_zero() {
        let (p, r) = precision_recall(&[600.0, 1.0], &[1.0, 1.0], 500.0).unwrap();
        assert_eq!(p, None);
        assert_eq!(r, Some(0.0));
        let (p, r) = precision_recall(&[1.0, 1.0], &[600.0, 1.0], 500.0).unwrap();
        assert_eq!(p, Some(0.0));
        assert_eq!(r, None);
    }

    #[test]
    fn summary_of_one_to_five() {
        let s = summary(&[5.0, 3.0, 1.0, 4.0, 2.0]).unwrap();
        assert_eq!(
            (s.min, s.q25, s.median, s.mean, s.q75, s.max),
            (1.0, 2.0, 3.0, 3.0, 4.0, 5.0)
        );
    }

    #[test]
    fn summary_of_single_value() {
        let s = summary(&[7.0]).unwrap();
        assert_eq!(
            (s.min, s.q25, s.median, s.mean, s.q75, s.max),
            (7.0, 7.0, 7.0, 7.0, 7.0, 7.0)
        );
    }

    #[test]
    fn summary_interpolates_between_order_statistics() {
        let s = summary(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((s.q25 - 1.75).abs() < 1e-12);
        assert!((s.median - 2.5).abs() < 1e-12);
        assert!((s.q75 - 3.25).abs() < 1e-12);
    }

    #[test]
    fn summary_ordering_holds_on_published_row_shape() {
        let s = summary(&[43.58, 64.28, 69.28, 75.70, 2130.14, 70.39]).unwrap();
        assert!(s.min <= s.q25 && s.q25 <= s.median && s.median <= s.q75 && s.q75 <= s.max);
        assert!(s.min <= s.mean && s.mean <= s.max);
    }

    #[test]
    fn critical_count_hand_cases() {
        let (count, pct) = critical_count(&[100.0, 600.0, 501.0, 500.0], 500.0).unwrap();
        assert_eq!((count, pct), (2, 50.0));
        let (count, pct) = critical_count(&[1.0, 2.0], 500.0).unwrap();
        assert_eq!((count, pct), (0, 0.0));
    }

    #[test]
    fn critical_fraction_matches_published_granularity() {
        let values: Vec<f64> = (0..125_000)
            .map(|i| if i < 5 { 600.0 } else { 10.0 })
            .collect();
        let (count, pct) = critical_count(&values, 500.0).unwrap();
        assert_eq!(count, 5);
        assert!((pct - 0.004).abs() < 1e-12);
    }

    #[test]
    fn critical_count_non_increasing_in_threshold() {
        let values = [10.0, 499.0, 500.0, 501.0, 1200.0, 40.0];
        let mut last = usize::MAX;
        for threshold in [0.0, 100.0, 500.0, 1000.0, 2000.0] {
            let (count, _) = critical_count(&values, threshold).unwrap();
            assert!(count <= last);
            last = count;
        }
    }
}
