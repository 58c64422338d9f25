//! Independent oracles for the acceptance suite: brute-force split
//! enumeration and naive metric re-implementations. These deliberately
//! avoid the library's code paths.

#![allow(dead_code)]

/// Best first split found by exhaustive enumeration over all features
/// and all midpoints of consecutive distinct sorted values, scored by
/// the naive SSE decrease. Ties go to the lowest feature index, then the
/// smallest threshold (strictly-greater replacement while scanning in
/// ascending feature and threshold order).
pub struct OracleSplit {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

fn sse(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut mean = 0.0;
    for v in values {
        mean += v;
    }
    mean /= values.len() as f64;
    let mut total = 0.0;
    for v in values {
        total += (v - mean) * (v - mean);
    }
    total
}

pub fn exhaustive_best_split(
    rows: &[Vec<f64>],
    y: &[f64],
    min_samples_leaf: usize,
) -> Option<OracleSplit> {
    let n = rows.len();
    let n_features = rows.first().map_or(0, |r| r.len());
    let parent_sse = sse(y);
    let mut best: Option<OracleSplit> = None;

    for feature in 0..n_features {
        let mut values: Vec<f64> = rows.iter().map(|r| r[feature]).collect();
        values.sort_by(|a, b| a.total_cmp(b));
        values.dedup();
        for pair in values.windows(2) {
            let (prev, next) = (pair[0], pair[1]);
            let mut threshold = 0.5 * (prev + next);
            if threshold >= next {
                threshold = prev;
            }
            let mut left = Vec::new();
            let mut right = Vec::new();
            for i in 0..n {
                if rows[i][feature] <= threshold {
                    left.push(y[i]);
                } else {
                    right.push(y[i]);
                }
            }
            if left.len() < min_samples_leaf || right.len() < min_samples_leaf {
                continue;
            }
            let gain = parent_sse - sse(&left) - sse(&right);
            if gain > best.as_ref().map_or(0.0, |b| b.gain) {
                best = Some(OracleSplit {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

/// Total SSE of the tree grown by recursively applying the exhaustive
/// greedy split until no split has positive gain.
pub fn exhaustive_greedy_sse(rows: &[Vec<f64>], y: &[f64], min_samples_leaf: usize) -> f64 {
    match exhaustive_best_split(rows, y, min_samples_leaf) {
        None => sse(y),
        Some(split) => {
            let mut left_rows = Vec::new();
            let mut left_y = Vec::new();
            let mut right_rows = Vec::new();
            let mut right_y = Vec::new();
            for (row, target) in rows.iter().zip(y) {
                if row[split.feature] <= split.threshold {
                    left_rows.push(row.clone());
                    left_y.push(*target);
                } else {
                    right_rows.push(row.clone());
                    right_y.push(*target);
                }
            }
            exhaustive_greedy_sse(&left_rows, &left_y, min_samples_leaf)
                + exhaustive_greedy_sse(&right_rows, &right_y, min_samples_leaf)
        }
    }
}

pub fn naive_rmse(actual: &[f64], predicted: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..actual.len() {
        let d = actual[i] - predicted[i];
        total += d * d;
    }
    (total / actual.len() as f64).sqrt()
}

pub fn naive_mae(actual: &[f64], predicted: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..actual.len() {
        total += (actual[i] - predicted[i]).abs();
    }
    total / actual.len() as f64
}

pub fn naive_r2(actual: &[f64], predicted: &[f64]) -> Option<f64> {
    let mut mean = 0.0;
    for a in actual {
        mean += a;
    }
    mean /= actual.len() as f64;
    let mut ss_tot = 0.0;
    for a in actual {
        ss_tot += (a - mean) * (a - mean);
    }
    if ss_tot == 0.0 {
        return None;
    }
    let mut ss_res = 0.0;
    for i in 0..actual.len() {
        let d = actual[i] - predicted[i];
        ss_res += d * d;
    }
    Some(1.0 - ss_res / ss_tot)
}

pub fn naive_precision_recall(
    actual: &[f64],
    predicted: &[f64],
    threshold: f64,
) -> (Option<f64>, Option<f64>) {
    let mut tp = 0.0;
    let mut fp = 0.0;
    let mut fn_ = 0.0;
    for i in 0..actual.len() {
        let a = actual[i] > threshold;
        let p = predicted[i] > threshold;
        if a && p {
            tp += 1.0;
        }
        if !a && p {
            fp += 1.0;
        }
        if a && !p {
            fn_ += 1.0;
        }
    }
    let precision = if tp + fp > 0.0 { Some(tp / (tp + fp)) } else { None };
    let recall = if tp + fn_ > 0.0 { Some(tp / (tp + fn_)) } else { None };
    (precision, recall)
}

/// Six-number summary via direct rank interpolation at `p * (n - 1)`.
pub fn naive_summary(values: &[f64]) -> (f64, f64, f64, f64, f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let q = |p: f64| -> f64 {
        let rank = p * (sorted.len() - 1) as f64;
        let lo = rank.floor() as usize;
        let hi = rank.ceil() as usize;
        sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
    };
    let mut mean = 0.0;
    for v in values {
        mean += v;
    }
    mean /= values.len() as f64;
    (sorted[0], q(0.25), q(0.5), mean, q(0.75), sorted[sorted.len() - 1])
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() / scale
}
