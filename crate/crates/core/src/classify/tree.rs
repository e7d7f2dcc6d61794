//! CART-style binary decision tree over continuous features.
//!
//! Splits are `x[feature] <= threshold`, with thresholds at midpoints between
//! consecutive distinct values. Features may be reused along a path. A split
//! is accepted whenever it leaves both children non-empty and respecting
//! `min_samples_leaf`, even at zero gain, so impure nodes keep splitting until
//! a depth limit or the data itself stops them.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, Prediction};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Gini,
    InformationGain,
}

impl Criterion {
    fn impurity(self, c0: usize, c1: usize) -> f64 {
        let n = (c0 + c1) as f64;
        if n == 0.0 {
            return 0.0;
        }
        let (p0, p1) = (c0 as f64 / n, c1 as f64 / n);
        match self {
            Criterion::Gini => 1.0 - p0 * p0 - p1 * p1,
            Criterion::InformationGain => {
                let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
                h(p0) + h(p1)
            }
        }
    }

    /// Parent impurity minus the size-weighted child impurities.
    pub fn gain(self, parent: [usize; 2], left: [usize; 2]) -> f64 {
        let right = [parent[0] - left[0], parent[1] - left[1]];
        let n = (parent[0] + parent[1]) as f64;
        let nl = (left[0] + left[1]) as f64;
        let nr = (right[0] + right[1]) as f64;
        self.impurity(parent[0], parent[1])
            - (nl / n) * self.impurity(left[0], left[1])
            - (nr / n) * self.impurity(right[0], right[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub criterion: Criterion,
    /// `None` grows until the leaves are pure or cannot be split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_leaf: 1,
            seed: 0,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_leaf == 0 {
            return Err(Error::Hyperparams(
                "tree min_samples_leaf must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Node array; the root is node 0 and children always follow their parent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: u8,
        /// Fraction of the leaf's training rows in the majority class.
        confidence: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub nodes: Vec<Node>,
}

impl TreeModel {
    pub fn validate(&self, width: usize) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Config("tree has no nodes".into()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Split {
                feature,
                left,
                right,
                threshold,
            } = node
            {
                let ok = *feature < width
                    && threshold.is_finite()
                    && *left > i
                    && *right > i
                    && *left < self.nodes.len()
                    && *right < self.nodes.len();
                if !ok {
                    return Err(Error::Config(format!("malformed tree node {i}")));
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_for(&self, row: &[f64]) -> (u8, f64) {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[feature] <= threshold {
                        left
                    } else {
                        right
                    }
                }
                Node::Leaf { class, confidence } => return (class, confidence),
            }
        }
    }
}

fn leaf(counts: [usize; 2]) -> Node {
    let n = (counts[0] + counts[1]) as f64;
    let class = (counts[1] > counts[0]) as u8;
    Node::Leaf {
        class,
        confidence: counts[class as usize] as f64 / n,
    }
}

fn class_counts(data: &Dataset, idx: &[usize]) -> [usize; 2] {
    let attack = idx.iter().filter(|&&i| data.labels[i] == 1).count();
    [idx.len() - attack, attack]
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Random per-node feature subsets for forests.
pub(crate) struct FeatureSampler<'r> {
    pub per_split: usize,
    pub rng: &'r mut ChaCha8Rng,
}

pub(crate) struct Grower<'a> {
    pub data: &'a Dataset,
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl Grower<'_> {
    /// Best split of `feature` over the rows in `idx`, or `None` if the feature
    /// is constant there. The flag tells whether the feature is constant.
    fn scan_feature(
        &self,
        idx: &[usize],
        parent: [usize; 2],
        feature: usize,
    ) -> (bool, Option<SplitChoice>) {
        let mut pairs: Vec<(f64, u8)> = idx
            .iter()
            .map(|&i| (self.data.rows[i][feature], self.data.labels[i]))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = pairs.len();
        if pairs[0].0 == pairs[n - 1].0 {
            return (true, None);
        }
        let mut left = [0usize; 2];
        let mut best: Option<SplitChoice> = None;
        for k in 0..n - 1 {
            left[pairs[k].1 as usize] += 1;
            let (lo, hi) = (pairs[k].0, pairs[k + 1].0);
            if lo == hi {
                continue;
            }
            let nl = k + 1;
            if nl < self.min_samples_leaf || n - nl < self.min_samples_leaf {
                continue;
            }
            let gain = self.criterion.gain(parent, left);
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                let mut threshold = lo + (hi - lo) / 2.0;
                if !(threshold >= lo && threshold < hi) {
                    threshold = lo;
                }
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
        (false, best)
    }

    fn best_split(
        &self,
        idx: &[usize],
        parent: [usize; 2],
        sampler: &mut Option<FeatureSampler<'_>>,
    ) -> Option<SplitChoice> {
        let width = self.data.width();
        let mut order: Vec<usize> = (0..width).collect();
        let budget = match sampler {
            Some(s) if s.per_split < width => {
                order.shuffle(s.rng);
                s.per_split
            }
            _ => width,
        };
        let mut visited = 0;
        let mut best: Option<SplitChoice> = None;
        for f in order {
            if visited == budget {
                break;
            }
            let (constant, choice) = self.scan_feature(idx, parent, f);
            if constant {
                continue;
            }
            visited += 1;
            if let Some(c) = choice {
                if best.as_ref().is_none_or(|b| c.gain > b.gain) {
                    best = Some(c);
                }
            }
        }
        best
    }

    pub fn grow(&self, root: Vec<usize>, mut sampler: Option<FeatureSampler<'_>>) -> TreeModel {
        let mut nodes = vec![leaf(class_counts(self.data, &root))];
        let mut stack = vec![(0usize, root, 0usize)];
        while let Some((id, idx, depth)) = stack.pop() {
            let counts = class_counts(self.data, &idx);
            nodes[id] = leaf(counts);
            let pure = counts[0] == 0 || counts[1] == 0;
            let depth_done = self.max_depth.is_some_and(|d| depth >= d);
            if pure || depth_done || idx.len() < 2 * self.min_samples_leaf {
                continue;
            }
            let Some(choice) = self.best_split(&idx, counts, &mut sampler) else {
                continue;
            };
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
                .iter()
                .partition(|&&i| self.data.rows[i][choice.feature] <= choice.threshold);
            let left = nodes.len();
            let right = left + 1;
            nodes.push(leaf(class_counts(self.data, &left_idx)));
            nodes.push(leaf(class_counts(self.data, &right_idx)));
            nodes[id] = Node::Split {
                feature: choice.feature,
                threshold: choice.threshold,
                left,
                right,
            };
            stack.push((right, right_idx, depth + 1));
            stack.push((left, left_idx, depth + 1));
        }
        TreeModel { nodes }
    }
}

pub fn train_tree(data: &Dataset, p: &TreeParams) -> Result<TreeModel> {
    p.validate()?;
    if data.is_empty() {
        return Err(Error::training("tree", "empty training set"));
    }
    let grower = Grower {
        data,
        criterion: p.criterion,
        max_depth: p.max_depth,
        min_samples_leaf: p.min_samples_leaf,
    };
    Ok(grower.grow((0..data.len()).collect(), None))
}

/// Leaf class; the score is the leaf's attack fraction.
pub fn predict_tree(m: &TreeModel, row: &[f64]) -> Result<Prediction> {
    let (class, confidence) = m.leaf_for(row);
    Ok(Prediction {
        class,
        score: if class == 1 {
            confidence
        } else {
            1.0 - confidence
        },
    })
}
