//! CART regression trees with exact variance-reduction split search.
//!
//! Split candidates are the midpoints of consecutive distinct sorted
//! feature values; the split maximizing the SSE decrease wins. Ties are
//! broken toward the lowest feature index, then the smallest threshold.
//! Descent convention: `row[feature] <= threshold` goes left.

use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;

use super::MlError;
use crate::data::FeatureMatrix;

/// Nodes at least this large fan the split search out across features.
const PARALLEL_SPLIT_THRESHOLD: usize = 4096;

/// Structural limits for a single tree. Zero means unbounded for both
/// `max_depth` and `max_leaves`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub max_leaves: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: 0,
            min_samples_leaf: 1,
            max_leaves: 0,
        }
    }
}

impl TreeConfig {
    pub fn with_max_depth(depth: usize) -> Self {
        Self {
            max_depth: depth,
            ..Self::default()
        }
    }

    pub fn with_max_leaves(leaves: usize) -> Self {
        Self {
            max_leaves: leaves,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), MlError> {
        if self.min_samples_leaf < 1 {
            return Err(MlError::InvalidConfig(
                "min_samples_leaf must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Node expansion order. The strategies coincide on unbounded trees and
/// differ under depth or leaf budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    /// Expand every node of one depth before the next.
    LevelWise,
    /// Repeatedly split the frontier leaf with the largest SSE gain.
    LeafWise,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// A fitted regression tree stored as a node arena with root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    /// Tree that predicts a constant.
    pub fn leaf(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub(crate) fn from_nodes(nodes: Vec<Node>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Value of the leaf reached by descending from the root.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut index = 0;
        loop {
            match &self.nodes[index] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    index = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Maximum depth of any leaf; a lone root is depth 0.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], index: usize) -> usize {
            match &nodes[index] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, Copy)]
struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Best split along one feature. Gains use the sum formulation
/// `S_l^2/n_l + S_r^2/n_r - S^2/n`, equal to the SSE decrease.
fn best_split_on_feature(
    x: &FeatureMatrix,
    y: &[f64],
    indices: &[usize],
    feature: usize,
    min_samples_leaf: usize,
    total: f64,
    parent_term: f64,
) -> Option<BestSplit> {
    let n = indices.len();
    let mut order: Vec<usize> = indices.to_vec();
    order.sort_by(|&a, &b| x.value(a, feature).total_cmp(&x.value(b, feature)));

    let mut best: Option<BestSplit> = None;
    let mut left_sum = 0.0;
    for k in 1..n {
        left_sum += y[order[k - 1]];
        let prev = x.value(order[k - 1], feature);
        let next = x.value(order[k], feature);
        if !(next > prev) {
            continue;
        }
        if k < min_samples_leaf || n - k < min_samples_leaf {
            continue;
        }
        let right_sum = total - left_sum;
        let gain =
            left_sum * left_sum / k as f64 + right_sum * right_sum / (n - k) as f64 - parent_term;
        if gain > best.as_ref().map_or(0.0, |b| b.gain) {
            // Midpoint can round up to `next`; fall back to `prev` so
            // the `<=` descent matches the evaluated partition.
            let mut threshold = 0.5 * (prev + next);
            if threshold >= next {
                threshold = prev;
            }
            best = Some(BestSplit {
                feature,
                threshold,
                gain,
            });
        }
    }
    best
}

/// Exhaustive best split over the candidate features. Per-feature
/// results are reduced in ascending feature order with strictly-greater
/// replacement, so ties resolve to the lowest feature index and the
/// smallest threshold no matter how the per-feature scans are scheduled.
fn best_split(
    x: &FeatureMatrix,
    y: &[f64],
    indices: &[usize],
    candidate_features: &[usize],
    min_samples_leaf: usize,
) -> Option<BestSplit> {
    let n = indices.len();
    if n < 2 || n < 2 * min_samples_leaf {
        return None;
    }
    let total: f64 = indices.iter().map(|&i| y[i]).sum();
    let parent_term = total * total / n as f64;

    let per_feature: Vec<Option<BestSplit>> =
        if n >= PARALLEL_SPLIT_THRESHOLD && candidate_features.len() > 1 {
            candidate_features
                .par_iter()
                .map(|&f| best_split_on_feature(x, y, indices, f, min_samples_leaf, total, parent_term))
                .collect()
        } else {
            candidate_features
                .iter()
                .map(|&f| best_split_on_feature(x, y, indices, f, min_samples_leaf, total, parent_term))
                .collect()
        };

    let mut best: Option<BestSplit> = None;
    for candidate in per_feature.into_iter().flatten() {
        if candidate.gain > best.as_ref().map_or(0.0, |b| b.gain) {
            best = Some(candidate);
        }
    }
    best
}

fn mean_of(y: &[f64], indices: &[usize]) -> f64 {
    indices.iter().map(|&i| y[i]).sum::<f64>() / indices.len() as f64
}

fn draw_features<R: Rng>(n_columns: usize, fraction: f64, rng: &mut R) -> Vec<usize> {
    let k = ((fraction * n_columns as f64).ceil() as usize).clamp(1, n_columns);
    if k == n_columns {
        return (0..n_columns).collect();
    }
    let mut picked = rand::seq::index::sample(rng, n_columns, k).into_vec();
    picked.sort_unstable();
    picked
}

struct Frontier {
    slot: usize,
    indices: Vec<usize>,
    depth: usize,
    split: Option<BestSplit>,
}

/// Fit a regression tree by greedy top-down growth.
///
/// `feature_fraction` subsamples the candidate features independently at
/// every split; 1.0 considers them all and draws nothing from `rng`.
pub fn fit_tree<R: Rng>(
    x: &FeatureMatrix,
    y: &[f64],
    config: &TreeConfig,
    growth: Growth,
    feature_fraction: f64,
    rng: &mut R,
) -> Result<RegressionTree, MlError> {
    config.validate()?;
    if !(feature_fraction > 0.0 && feature_fraction <= 1.0) {
        return Err(MlError::InvalidConfig(format!(
            "feature_fraction {feature_fraction} outside (0, 1]"
        )));
    }
    if x.n_rows() != y.len() {
        return Err(MlError::LengthMismatch {
            x_rows: x.n_rows(),
            y_len: y.len(),
        });
    }
    if y.is_empty() {
        return Err(MlError::EmptyTrainingSet);
    }

    let n_columns = x.n_columns();
    let all_indices: Vec<usize> = (0..y.len()).collect();
    let mut nodes = vec![Node::Leaf {
        value: mean_of(y, &all_indices),
    }];

    let may_split = |depth: usize| config.max_depth == 0 || depth < config.max_depth;
    let evaluate = |indices: &[usize], depth: usize, rng: &mut R| -> Option<BestSplit> {
        if !may_split(depth) {
            return None;
        }
        let features = draw_features(n_columns, feature_fraction, rng);
        best_split(x, y, indices, &features, config.min_samples_leaf)
    };

    let apply_split =
        |nodes: &mut Vec<Node>, slot: usize, indices: &[usize], split: &BestSplit| {
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                .iter()
                .partition(|&&i| x.value(i, split.feature) <= split.threshold);
            let left = nodes.len();
            nodes.push(Node::Leaf {
                value: mean_of(y, &left_idx),
            });
            let right = nodes.len();
            nodes.push(Node::Leaf {
                value: mean_of(y, &right_idx),
            });
            nodes[slot] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            };
            (left_idx, right_idx)
        };

    match growth {
        Growth::LevelWise => {
            let mut queue = VecDeque::new();
            queue.push_back((0usize, all_indices, 0usize));
            let mut leaves = 1usize;
            while let Some((slot, indices, depth)) = queue.pop_front() {
                if config.max_leaves != 0 && leaves >= config.max_leaves {
                    break;
                }
                let Some(split) = evaluate(&indices, depth, rng) else {
                    continue;
                };
                let (left_idx, right_idx) = apply_split(&mut nodes, slot, &indices, &split);
                leaves += 1;
                queue.push_back((
                    match nodes[slot] {
                        Node::Split { left, .. } => left,
                        _ => unreachable!(),
                    },
                    left_idx,
                    depth + 1,
                ));
                queue.push_back((
                    match nodes[slot] {
                        Node::Split { right, .. } => right,
                        _ => unreachable!(),
                    },
                    right_idx,
                    depth + 1,
                ));
            }
        }
        Growth::LeafWise => {
            let root_split = evaluate(&all_indices, 0, rng);
            let mut frontier = vec![Frontier {
                slot: 0,
                indices: all_indices,
                depth: 0,
                split: root_split,
            }];
            let mut leaves = 1usize;
            while config.max_leaves == 0 || leaves < config.max_leaves {
                // Globally best frontier leaf; ties go to the oldest slot.
                let Some(pos) = frontier
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| f.split.is_some())
                    .max_by(|(_, a), (_, b)| {
                        let ga = a.split.as_ref().unwrap().gain;
                        let gb = b.split.as_ref().unwrap().gain;
                        ga.total_cmp(&gb).then(b.slot.cmp(&a.slot))
                    })
                    .map(|(i, _)| i)
                else {
                    break;
                };
                let entry = frontier.swap_remove(pos);
                let split = entry.split.expect("filtered on some");
                let (left_idx, right_idx) = apply_split(&mut nodes, entry.slot, &entry.indices, &split);
                leaves += 1;
                let (left, right) = match nodes[entry.slot] {
                    Node::Split { left, right, .. } => (left, right),
                    _ => unreachable!(),
                };
                let left_split = evaluate(&left_idx, entry.depth + 1, rng);
                frontier.push(Frontier {
                    slot: left,
                    indices: left_idx,
                    depth: entry.depth + 1,
                    split: left_split,
                });
                let right_split = evaluate(&right_idx, entry.depth + 1, rng);
                frontier.push(Frontier {
                    slot: right,
                    indices: right_idx,
                    depth: entry.depth + 1,
                    split: right_split,
                });
            }
        }
    }

    Ok(RegressionTree::from_nodes(nodes))
}
