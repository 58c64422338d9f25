//! Trained-model container, the four canonical presets, prediction, and
//! the versioned binary model format.
//!
//! # Binary layout (version 1, little-endian)
//!
//! ```text
//! magic            4  b"RDLM"
//! version          2  u16
//! preset tag       1  u8 (0 forest100, 1 boost_level100, 2 boost_leaf100, 3 boost_depth6_lr01)
//! delay kind tag   1  u8 (0 none, 1 position, 2 ma, 3 tcp, 4 http, 5 dns)
//! seed             8  u64
//! row count        8  u64
//! column count     2  u16
//! per column:         u16 name length + UTF-8 bytes
//! ensemble tag     1  u8 (0 forest, 1 boosted)
//! boosted only:   16  f64 init, f64 learning rate
//! tree count       4  u32
//! per tree:        4  u32 node count, then per node:
//!                  1  u8 tag; leaf: f64 value
//!                              split: u32 feature, f64 threshold, u32 left, u32 right
//! ```

use std::fmt;
use std::str::FromStr;

use super::boost::{fit_boosted, BoostConfig};
use super::forest::{fit_forest, ForestConfig};
use super::tree::{Node, RegressionTree};
use super::MlError;
use crate::data::{DelayKind, FeatureMatrix};

pub const MODEL_FORMAT_VERSION: u16 = 1;
const MODEL_MAGIC: &[u8; 4] = b"RDLM";

/// The four model configurations evaluated per delay kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelPreset {
    /// Bagged forest, 100 trees.
    Forest100,
    /// Level-wise boosting, depth 6, learning rate 0.3.
    BoostLevel100,
    /// Leaf-wise boosting, 31 leaves, learning rate 0.1.
    BoostLeaf100,
    /// Level-wise boosting, depth 6, learning rate 0.1.
    BoostDepth6Lr01,
}

impl ModelPreset {
    /// Declared order; selection ties resolve to the earliest entry.
    pub const ALL: [ModelPreset; 4] = [
        ModelPreset::Forest100,
        ModelPreset::BoostLevel100,
        ModelPreset::BoostLeaf100,
        ModelPreset::BoostDepth6Lr01,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            ModelPreset::Forest100 => "forest100",
            ModelPreset::BoostLevel100 => "boost_level100",
            ModelPreset::BoostLeaf100 => "boost_leaf100",
            ModelPreset::BoostDepth6Lr01 => "boost_depth6_lr01",
        }
    }

    /// Position in [`ModelPreset::ALL`].
    pub fn index(self) -> usize {
        self.tag() as usize
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ModelPreset::Forest100 => "Forest",
            ModelPreset::BoostLevel100 => "Boost/level",
            ModelPreset::BoostLeaf100 => "Boost/leaf",
            ModelPreset::BoostDepth6Lr01 => "Boost/depth6",
        }
    }

    fn tag(self) -> u8 {
        match self {
            ModelPreset::Forest100 => 0,
            ModelPreset::BoostLevel100 => 1,
            ModelPreset::BoostLeaf100 => 2,
            ModelPreset::BoostDepth6Lr01 => 3,
        }
    }

    fn from_tag(tag: u8) -> Result<Self, MlError> {
        match tag {
            0 => Ok(ModelPreset::Forest100),
            1 => Ok(ModelPreset::BoostLevel100),
            2 => Ok(ModelPreset::BoostLeaf100),
            3 => Ok(ModelPreset::BoostDepth6Lr01),
            value => Err(MlError::InvalidTag {
                what: "preset",
                value,
            }),
        }
    }
}

impl fmt::Display for ModelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ModelPreset {
    type Err = MlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelPreset::ALL
            .into_iter()
            .find(|p| p.slug() == s)
            .ok_or_else(|| MlError::UnknownPreset(s.to_string()))
    }
}

/// Fitted trees plus the combination rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    Forest {
        trees: Vec<RegressionTree>,
    },
    Boosted {
        init: f64,
        learning_rate: f64,
        trees: Vec<RegressionTree>,
    },
}

impl Ensemble {
    pub fn n_trees(&self) -> usize {
        match self {
            Ensemble::Forest { trees } | Ensemble::Boosted { trees, .. } => trees.len(),
        }
    }

    /// Forest: arithmetic mean of tree outputs. Boosted: init plus the
    /// learning rate times the tree-output sum.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            Ensemble::Forest { trees } => {
                trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / trees.len() as f64
            }
            Ensemble::Boosted {
                init,
                learning_rate,
                trees,
            } => init + learning_rate * trees.iter().map(|t| t.predict_row(row)).sum::<f64>(),
        }
    }
}

/// Provenance recorded with every fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMetadata {
    pub seed: u64,
    pub n_rows: u64,
    pub delay_kind: Option<DelayKind>,
    pub columns: Vec<String>,
}

/// A fitted ensemble with its preset label and training provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub preset: ModelPreset,
    pub ensemble: Ensemble,
    pub metadata: ModelMetadata,
}

impl TrainedModel {
    /// Predict every row of a matrix whose columns match the training
    /// layout.
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<f64>, MlError> {
        if x.column_names() != self.metadata.columns.as_slice() {
            return Err(MlError::ColumnMismatch {
                expected: self.metadata.columns.clone(),
            });
        }
        Ok(x.rows().map(|row| self.ensemble.predict_row(row)).collect())
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.ensemble.predict_row(row)
    }
}

/// Train one canonical preset on a feature matrix.
pub fn train_preset(
    preset: ModelPreset,
    x: &FeatureMatrix,
    y: &[f64],
    seed: u64,
    delay_kind: Option<DelayKind>,
) -> Result<TrainedModel, MlError> {
    let ensemble = match preset {
        ModelPreset::Forest100 => fit_forest(x, y, &ForestConfig::new(seed))?,
        ModelPreset::BoostLevel100 => fit_boosted(x, y, &BoostConfig::level_wise(6, 0.3, seed))?,
        ModelPreset::BoostLeaf100 => fit_boosted(x, y, &BoostConfig::leaf_wise(31, 0.1, seed))?,
        ModelPreset::BoostDepth6Lr01 => fit_boosted(x, y, &BoostConfig::level_wise(6, 0.1, seed))?,
    };
    Ok(TrainedModel {
        preset,
        ensemble,
        metadata: ModelMetadata {
            seed,
            n_rows: y.len() as u64,
            delay_kind,
            columns: x.column_names().to_vec(),
        },
    })
}

fn kind_tag(kind: Option<DelayKind>) -> u8 {
    match kind {
        None => 0,
        Some(k) => k.index() as u8 + 1,
    }
}

fn kind_from_tag(tag: u8) -> Result<Option<DelayKind>, MlError> {
    match tag {
        0 => Ok(None),
        1..=5 => Ok(Some(DelayKind::ALL[tag as usize - 1])),
        value => Err(MlError::InvalidTag {
            what: "delay kind",
            value,
        }),
    }
}

impl TrainedModel {
    /// Serialize to the versioned binary format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MODEL_MAGIC);
        out.extend_from_slice(&MODEL_FORMAT_VERSION.to_le_bytes());
        out.push(self.preset.tag());
        out.push(kind_tag(self.metadata.delay_kind));
        out.extend_from_slice(&self.metadata.seed.to_le_bytes());
        out.extend_from_slice(&self.metadata.n_rows.to_le_bytes());
        out.extend_from_slice(&(self.metadata.columns.len() as u16).to_le_bytes());
        for name in &self.metadata.columns {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
        }
        match &self.ensemble {
            Ensemble::Forest { trees } => {
                out.push(0);
                write_trees(&mut out, trees);
            }
            Ensemble::Boosted {
                init,
                learning_rate,
                trees,
            } => {
                out.push(1);
                out.extend_from_slice(&init.to_le_bytes());
                out.extend_from_slice(&learning_rate.to_le_bytes());
                write_trees(&mut out, trees);
            }
        }
        out
    }

    /// Parse a model written by [`TrainedModel::to_bytes`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, MlError> {
        let mut cursor = Cursor { bytes, pos: 0 };
        if cursor.take(4)? != MODEL_MAGIC {
            return Err(MlError::BadMagic);
        }
        let version = cursor.u16()?;
        if version != MODEL_FORMAT_VERSION {
            return Err(MlError::UnsupportedVersion(version));
        }
        let preset = ModelPreset::from_tag(cursor.u8()?)?;
        let delay_kind = kind_from_tag(cursor.u8()?)?;
        let seed = cursor.u64()?;
        let n_rows = cursor.u64()?;
        let n_columns = cursor.u16()? as usize;
        let mut columns = Vec::with_capacity(n_columns);
        for _ in 0..n_columns {
            let len = cursor.u16()? as usize;
            let raw = cursor.take(len)?;
            let name = std::str::from_utf8(raw)
                .map_err(|_| MlError::InvalidTag {
                    what: "column name",
                    value: 0,
                })?
                .to_string();
            columns.push(name);
        }
        let ensemble = match cursor.u8()? {
            0 => Ensemble::Forest {
                trees: read_trees(&mut cursor)?,
            },
            1 => {
                let init = cursor.f64()?;
                let learning_rate = cursor.f64()?;
                Ensemble::Boosted {
                    init,
                    learning_rate,
                    trees: read_trees(&mut cursor)?,
                }
            }
            value => {
                return Err(MlError::InvalidTag {
                    what: "ensemble",
                    value,
                })
            }
        };
        Ok(TrainedModel {
            preset,
            ensemble,
            metadata: ModelMetadata {
                seed,
                n_rows,
                delay_kind,
                columns,
            },
        })
    }
}

fn write_trees(out: &mut Vec<u8>, trees: &[RegressionTree]) {
    out.extend_from_slice(&(trees.len() as u32).to_le_bytes());
    for tree in trees {
        out.extend_from_slice(&(tree.nodes().len() as u32).to_le_bytes());
        for node in tree.nodes() {
            match node {
                Node::Leaf { value } => {
                    out.push(0);
                    out.extend_from_slice(&value.to_le_bytes());
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    out.push(1);
                    out.extend_from_slice(&(*feature as u32).to_le_bytes());
                    out.extend_from_slice(&threshold.to_le_bytes());
                    out.extend_from_slice(&(*left as u32).to_le_bytes());
                    out.extend_from_slice(&(*right as u32).to_le_bytes());
                }
            }
        }
    }
}

fn read_trees(cursor: &mut Cursor<'_>) -> Result<Vec<RegressionTree>, MlError> {
    let n_trees = cursor.u32()? as usize;
    let mut trees = Vec::with_capacity(n_trees.min(1 << 20));
    for _ in 0..n_trees {
        let n_nodes = cursor.u32()? as usize;
        let mut nodes = Vec::with_capacity(n_nodes.min(1 << 24));
        for _ in 0..n_nodes {
            let node = match cursor.u8()? {
                0 => Node::Leaf {
                    value: cursor.f64()?,
                },
                1 => {
                    let feature = cursor.u32()? as usize;
                    let threshold = cursor.f64()?;
                    let left = cursor.u32()? as usize;
                    let right = cursor.u32()? as usize;
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    }
                }
                value => {
                    return Err(MlError::InvalidTag {
                        what: "node",
                        value,
                    })
                }
            };
            nodes.push(node);
        }
        if nodes.is_empty() {
            return Err(MlError::Truncated);
        }
        trees.push(RegressionTree::from_nodes(nodes));
    }
    Ok(trees)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], MlError> {
        if self.pos + n > self.bytes.len() {
            return Err(MlError::Truncated);
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, MlError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, MlError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, MlError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, MlError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, MlError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
