use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{predict_tree, Criterion, FeatureSampler, Grower, TreeModel};
use super::{Dataset, Prediction};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub tree_count: usize,
    /// Candidate features examined per node; `None` means ⌈√(feature count)⌉.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Tree `i` draws from a generator seeded with `seed + i`.
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            tree_count: 10,
            features_per_split: None,
            bootstrap: true,
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_leaf: 1,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.tree_count < 1 {
            return Err(Error::Hyperparams("forest tree_count must be >= 1".into()));
        }
        if self.features_per_split == Some(0) {
            return Err(Error::Hyperparams(
                "forest features_per_split must be >= 1".into(),
            ));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::Hyperparams(
                "forest min_samples_leaf must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteRule {
    /// Attack iff strictly more than half of the trees vote attack.
    #[default]
    MajorityTieBenign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    pub vote: VoteRule,
}

pub fn default_features_per_split(width: usize) -> usize {
    ((width as f64).sqrt().ceil() as usize).max(1)
}

pub fn train_forest(data: &Dataset, p: &ForestParams) -> Result<ForestModel> {
    p.validate()?;
    if data.is_empty() {
        return Err(Error::training("forest", "empty training set"));
    }
    let width = data.width();
    let per_split = p
        .features_per_split
        .unwrap_or_else(|| default_features_per_split(width))
        .min(width.max(1));
    let grower = Grower {
        data,
        criterion: p.criterion,
        max_depth: p.max_depth,
        min_samples_leaf: p.min_samples_leaf,
    };
    let n = data.len();
    let trees = (0..p.tree_count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(p.seed.wrapping_add(i as u64));
            let rows: Vec<usize> = if p.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grower.grow(
                rows,
                Some(FeatureSampler {
                    per_split,
                    rng: &mut rng,
                }),
            )
        })
        .collect();
    Ok(ForestModel {
        trees,
        vote: VoteRule::MajorityTieBenign,
    })
}

/// Majority vote over the trees; the score is the attack-vote fraction.
pub fn predict_forest(m: &ForestModel, row: &[f64]) -> Result<Prediction> {
    if m.trees.is_empty() {
        return Err(Error::Config("forest has no trees".into()));
    }
    let mut attack = 0usize;
    for tree in &m.trees {
        attack += predict_tree(tree, row)?.class as usize;
    }
    let total = m.trees.len();
    Ok(Prediction {
        class: (2 * attack > total) as u8,
        score: attack as f64 / total as f64,
    })
}
