//! Gradient boosting with squared-error loss: stagewise residual
//! fitting from a mean base prediction.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::Ensemble;
use super::tree::{fit_tree, Growth, TreeConfig};
use super::{mix_seed, MlError};
use crate::data::FeatureMatrix;

/// Boosting configuration. Trees are stored unscaled; predictions apply
/// `F0 + learning_rate * sum(trees)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub growth: Growth,
    pub tree: TreeConfig,
    pub seed: u64,
}

impl BoostConfig {
    /// Level-wise growth with a depth budget, the conventional boosted
    /// baseline shape.
    pub fn level_wise(depth: usize, learning_rate: f64, seed: u64) -> Self {
        Self {
            n_rounds: 100,
            learning_rate,
            growth: Growth::LevelWise,
            tree: TreeConfig::with_max_depth(depth),
            seed,
        }
    }

    /// Leaf-wise growth with a leaf budget.
    pub fn leaf_wise(max_leaves: usize, learning_rate: f64, seed: u64) -> Self {
        Self {
            n_rounds: 100,
            learning_rate,
            growth: Growth::LeafWise,
            tree: TreeConfig::with_max_leaves(max_leaves),
            seed,
        }
    }

    fn validate(&self) -> Result<(), MlError> {
        if self.n_rounds < 1 {
            return Err(MlError::InvalidConfig("n_rounds must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(MlError::InvalidConfig(format!(
                "learning_rate {} outside (0, 1]",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// Fit a boosted ensemble: start from the target mean, then for each
/// round fit a tree to the residuals and step the model by
/// `learning_rate` times that tree.
pub fn fit_boosted(x: &FeatureMatrix, y: &[f64], config: &BoostConfig) -> Result<Ensemble, MlError> {
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

    let init = y.iter().sum::<f64>() / y.len() as f64;
    let mut current = vec![init; y.len()];
    let mut residuals = vec![0.0; y.len()];
    let mut trees = Vec::with_capacity(config.n_rounds);

    for round in 0..config.n_rounds {
        for ((r, target), fitted) in residuals.iter_mut().zip(y).zip(&current) {
            *r = target - fitted;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, round as u64));
        let tree = fit_tree(x, &residuals, &config.tree, config.growth, 1.0, &mut rng)?;
        for (i, fitted) in current.iter_mut().enumerate() {
            *fitted += config.learning_rate * tree.predict_row(x.row(i));
        }
        trees.push(tree);
    }

    Ok(Ensemble::Boosted {
        init,
        learning_rate: config.learning_rate,
        trees,
    })
}

/// Training RMSE after each boosting round, for convergence audits.
/// Returns `None` for non-boosted ensembles.
pub fn staged_training_rmse(ensemble: &Ensemble, x: &FeatureMatrix, y: &[f64]) -> Option<Vec<f64>> {
    let Ensemble::Boosted {
        init,
        learning_rate,
        trees,
    } = ensemble
    else {
        return None;
    };
    let mut current = vec![*init; y.len()];
    let mut staged = Vec::with_capacity(trees.len());
    for tree in trees {
        for (i, fitted) in current.iter_mut().enumerate() {
            *fitted += learning_rate * tree.predict_row(x.row(i));
        }
        let rmse = crate::metrics::rmse(y, &current).expect("aligned non-empty");
        staged.push(rmse);
    }
    Some(staged)
}
