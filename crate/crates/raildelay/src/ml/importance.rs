//! Permutation feature importance: RMSE degradation after shuffling one
//! feature column at a time.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::model::TrainedModel;
use super::{mix_seed, MlError};
use crate::data::FeatureMatrix;
use crate::metrics;

/// Per-feature importance: mean over repeats of
/// `rmse(column permuted) - rmse(baseline)`, in the matrix column order.
/// Permutations are seeded per (feature, repeat), so results do not
/// depend on evaluation order.
pub fn permutation_importance(
    model: &TrainedModel,
    x: &FeatureMatrix,
    y: &[f64],
    n_repeats: usize,
    seed: u64,
) -> Result<Vec<f64>, MlError> {
    if n_repeats < 1 {
        return Err(MlError::InvalidConfig("n_repeats must be at least 1".into()));
    }
    if x.n_rows() != y.len() {
        return Err(MlError::LengthMismatch {
            x_rows: x.n_rows(),
            y_len: y.len(),
        });
    }
    if y.len() < 2 {
        return Err(MlError::TooFewRows {
            needed: 2,
            found: y.len(),
        });
    }

    let baseline = metrics::rmse(y, &model.predict(x)?)?;
    let n_repeats_u64 = n_repeats as u64;

    (0..x.n_columns())
        .into_par_iter()
        .map(|feature| {
            let mut total = 0.0;
            for repeat in 0..n_repeats {
                let stream = feature as u64 * n_repeats_u64 + repeat as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, stream));
                let mut column: Vec<f64> = (0..x.n_rows()).map(|r| x.value(r, feature)).collect();
                column.shuffle(&mut rng);
                let mut permuted = x.clone();
                for (r, value) in column.into_iter().enumerate() {
                    permuted.set_value(r, feature, value);
                }
                let rmse = metrics::rmse(y, &model.predict(&permuted)?)?;
                total += rmse - baseline;
            }
            Ok(total / n_repeats as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DelayKind;
    use crate::ml::model::{Ensemble, ModelMetadata, ModelPreset};
    use crate::ml::tree::{Node, RegressionTree};

    fn stump_on_feature_zero() -> TrainedModel {
        let tree = RegressionTree::from_nodes(vec![
            Node::Split {
                feature: 0,
                threshold: 0.5,
                left: 1,
                right: 2,
            },
            Node::Leaf { value: 0.0 },
            Node::Leaf { value: 10.0 },
        ]);
        TrainedModel {
            preset: ModelPreset::Forest100,
            ensemble: Ensemble::Forest { trees: vec![tree] },
            metadata: ModelMetadata {
                seed: 0,
                n_rows: 4,
                delay_kind: Some(DelayKind::Tcp),
                columns: vec!["f0".into(), "f1".into()],
            },
        }
    }

    fn data() -> (FeatureMatrix, Vec<f64>) {
        let mut x = FeatureMatrix::new(vec!["f0".into(), "f1".into()]);
        let rows: [[f64; 2]; 6] = [
            [0.0, 3.0],
            [1.0, 3.0],
            [0.2, 3.0],
            [0.9, 3.0],
            [0.1, 3.0],
            [0.8, 3.0],
        ];
        let mut y = Vec::new();
        for row in rows {
            x.push_row(&row);
            y.push(if row[0] <= 0.5 { 0.0 } else { 10.0 });
        }
        (x, y)
    }

    #[test]
    fn constant_feature_has_exactly_zero_importance() {
        let model = stump_on_feature_zero();
        let (x, y) = data();
        let importance = permutation_importance(&model, &x, &y, 3, 17).unwrap();
        assert_eq!(importance[1], 0.0);
    }

    #[test]
    fn unused_feature_has_zero_importance() {
        let model = stump_on_feature_zero();
        let mut x = FeatureMatrix::new(vec!["f0".into(), "f1".into()]);
        let mut y = Vec::new();
        for i in 0..8 {
            let row = [if i < 4 { 0.0 } else { 1.0 }, (i * 13 % 7) as f64];
            x.push_row(&row);
            y.push(if row[0] <= 0.5 { 0.0 } else { 10.0 });
        }
        let importance = permutation_importance(&model, &x, &y, 4, 5).unwrap();
        assert_eq!(importance[1], 0.0);
        assert!(importance[0] > 0.0);
    }

    #[test]
    fn repeated_call_is_deterministic() {
        let model = stump_on_feature_zero();
        let (x, y) = data();
        let a = permutation_importance(&model, &x, &y, 5, 99).unwrap();
        let b = permutation_importance(&model, &x, &y, 5, 99).unwrap();
        assert_eq!(a, b);
    }
}
