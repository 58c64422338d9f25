//! Bagged forest of regression trees.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::model::Ensemble;
use super::tree::{fit_tree, Growth, TreeConfig};
use super::{mix_seed, MlError};
use crate::data::FeatureMatrix;

/// Forest training configuration. Trees are unbounded by default and
/// averaged with equal weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub bootstrap: bool,
    /// Fraction of features considered at each split.
    pub feature_fraction: f64,
    pub tree: TreeConfig,
    pub seed: u64,
}

impl ForestConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            n_trees: 100,
            bootstrap: true,
            feature_fraction: 1.0,
            tree: TreeConfig::default(),
            seed,
        }
    }

    fn validate(&self) -> Result<(), MlError> {
        if self.n_trees < 1 {
            return Err(MlError::InvalidConfig("n_trees must be at least 1".into()));
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return Err(MlError::InvalidConfig(format!(
                "feature_fraction {} outside (0, 1]",
                self.feature_fraction
            )));
        }
        Ok(())
    }
}

/// Fit a forest: each tree trains on a bootstrap resample of the input
/// (or the full input when bootstrap is off) with per-split feature
/// subsampling. Per-tree RNGs derive from the seed alone, so the result
/// is identical no matter how many threads train in parallel.
pub fn fit_forest(x: &FeatureMatrix, y: &[f64], config: &ForestConfig) -> Result<Ensemble, MlError> {
    config.validate()?;
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

    let n = y.len();
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|tree_index| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, tree_index as u64));
            if config.bootstrap {
                let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let bx = x.select(&indices);
                let by: Vec<f64> = indices.iter().map(|&i| y[i]).collect();
                fit_tree(
                    &bx,
                    &by,
                    &config.tree,
                    Growth::LevelWise,
                    config.feature_fraction,
                    &mut rng,
                )
            } else {
                fit_tree(
                    x,
                    y,
                    &config.tree,
                    Growth::LevelWise,
                    config.feature_fraction,
                    &mut rng,
                )
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(Ensemble::Forest { trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FEATURE_NAMES;

    fn training_data(n: usize) -> (FeatureMatrix, Vec<f64>) {
        let mut x = FeatureMatrix::standard();
        let mut y = Vec::new();
        for i in 0..n {
            let mut row = [0.0f64; 10];
            for (c, value) in row.iter_mut().enumerate() {
                *value = ((i * 31 + c * 17) % 97) as f64 / 9.7;
            }
            x.push_row(&row);
            y.push(row[0] * 2.0 - row[9] + ((i % 5) as f64));
        }
        assert_eq!(x.column_names().len(), FEATURE_NAMES.len());
        (x, y)
    }

    #[test]
    fn single_tree_without_bootstrap_equals_plain_tree() {
        let (x, y) = training_data(30);
        let config = ForestConfig {
            n_trees: 1,
            bootstrap: false,
            ..ForestConfig::new(3)
        };
        let forest = fit_forest(&x, &y, &config).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(3, 0));
        let tree = fit_tree(&x, &y, &TreeConfig::default(), Growth::LevelWise, 1.0, &mut rng)
            .unwrap();
        for row in x.rows() {
            assert_eq!(forest.predict_row(row), tree.predict_row(row));
        }
    }

    #[test]
    fn constant_target_predicts_that_constant() {
        let (x, _) = training_data(20);
        let y = vec![42.5; 20];
        let forest = fit_forest(&x, &y, &ForestConfig::new(9)).unwrap();
        for row in x.rows() {
            assert_eq!(forest.predict_row(row), 42.5);
        }
    }

    #[test]
    fn same_seed_reproduces_predictions() {
        let (x, y) = training_data(40);
        let a = fit_forest(&x, &y, &ForestConfig::new(11)).unwrap();
        let b = fit_forest(&x, &y, &ForestConfig::new(11)).unwrap();
        let (probe, _) = training_data(17);
        for row in probe.rows() {
            assert_eq!(a.predict_row(row), b.predict_row(row));
        }
    }

    #[test]
    fn different_seeds_differ_somewhere() {
        let (x, y) = training_data(40);
        let a = fit_forest(&x, &y, &ForestConfig::new(1)).unwrap();
        let b = fit_forest(&x, &y, &ForestConfig::new(2)).unwrap();
        let diff = x
            .rows()
            .any(|row| a.predict_row(row) != b.predict_row(row));
        assert!(diff);
    }

    #[test]
    fn memorizes_distinct_rows_without_bootstrap() {
        let (x, y) = training_data(20);
        let config = ForestConfig {
            n_trees: 1,
            bootstrap: false,
            ..ForestConfig::new(5)
        };
        let forest = fit_forest(&x, &y, &config).unwrap();
        for (row, target) in x.rows().zip(&y) {
            assert_eq!(forest.predict_row(row), *target);
        }
    }

    #[test]
    fn rejects_single_row() {
        let (x, y) = training_data(1);
        let err = fit_forest(&x, &y, &ForestConfig::new(0)).unwrap_err();
        assert!(matches!(err, MlError::TooFewRows { .. }));
    }
}
