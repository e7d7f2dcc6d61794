//! Binary classifiers behind one train/predict contract.
//!
//! Labels are 0 = benign, 1 = attack. Every trainer is a pure function of the
//! training table and its hyperparameters (seed included), and every tie in a
//! decision resolves to class 0.

pub mod bayes;
pub mod forest;
pub mod logistic;
pub mod svm;
pub mod tree;

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::tabular::Table;

pub use bayes::{BayesModel, BayesParams};
pub use forest::{ForestModel, ForestParams};
pub use logistic::{LogisticModel, LogisticParams};
pub use svm::{SvmModel, SvmParams};
pub use tree::{Criterion, Node, TreeModel, TreeParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Logistic,
    NaiveBayes,
    Svm,
    Tree,
    Forest,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Logistic,
        Algorithm::NaiveBayes,
        Algorithm::Svm,
        Algorithm::Tree,
        Algorithm::Forest,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Logistic => "logistic",
            Algorithm::NaiveBayes => "naive_bayes",
            Algorithm::Svm => "svm",
            Algorithm::Tree => "tree",
            Algorithm::Forest => "forest",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown classifier {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum Hyperparams {
    Logistic(LogisticParams),
    NaiveBayes(BayesParams),
    Svm(SvmParams),
    Tree(TreeParams),
    Forest(ForestParams),
}

impl Hyperparams {
    pub fn default_for(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Logistic => Hyperparams::Logistic(LogisticParams::default()),
            Algorithm::NaiveBayes => Hyperparams::NaiveBayes(BayesParams::default()),
            Algorithm::Svm => Hyperparams::Svm(SvmParams::default()),
            Algorithm::Tree => Hyperparams::Tree(TreeParams::default()),
            Algorithm::Forest => Hyperparams::Forest(ForestParams::default()),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Hyperparams::Logistic(_) => Algorithm::Logistic,
            Hyperparams::NaiveBayes(_) => Algorithm::NaiveBayes,
            Hyperparams::Svm(_) => Algorithm::Svm,
            Hyperparams::Tree(_) => Algorithm::Tree,
            Hyperparams::Forest(_) => Algorithm::Forest,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            Hyperparams::Logistic(p) => p.seed = seed,
            Hyperparams::NaiveBayes(p) => p.seed = seed,
            Hyperparams::Svm(p) => p.seed = seed,
            Hyperparams::Tree(p) => p.seed = seed,
            Hyperparams::Forest(p) => p.seed = seed,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Hyperparams::Logistic(p) => p.validate(),
            Hyperparams::NaiveBayes(p) => p.validate(),
            Hyperparams::Svm(p) => p.validate(),
            Hyperparams::Tree(p) => p.validate(),
            Hyperparams::Forest(p) => p.validate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", content = "parameters", rename_all = "snake_case")]
pub enum ModelParameters {
    Logistic(LogisticModel),
    NaiveBayes(BayesModel),
    Svm(SvmModel),
    Tree(TreeModel),
    Forest(ForestModel),
}

impl ModelParameters {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            ModelParameters::Logistic(_) => Algorithm::Logistic,
            ModelParameters::NaiveBayes(_) => Algorithm::NaiveBayes,
            ModelParameters::Svm(_) => Algorithm::Svm,
            ModelParameters::Tree(_) => Algorithm::Tree,
            ModelParameters::Forest(_) => Algorithm::Forest,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: u8,
    /// Attack score in [0, 1].
    pub score: f64,
}

/// Row-major feature values with 0/1 labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl Dataset {
    pub fn from_table(t: &Table) -> Result<Self> {
        Ok(Dataset {
            rows: t.feature_rows(),
            labels: t.binary_labels()?,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let attack = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - attack, attack]
    }
}

/// Hash of the ordered feature names and column kinds a model was trained on.
pub fn schema_fingerprint(t: &Table) -> String {
    let mut hasher = Sha256::new();
    for c in t.features() {
        hasher.update(c.name.as_bytes());
        hasher.update([0x1f]);
        hasher.update(format!("{:?}", c.kind).as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    #[serde(flatten)]
    pub parameters: ModelParameters,
    pub hyperparams: Hyperparams,
    pub features: Vec<String>,
    pub schema_fingerprint: String,
}

impl TrainedModel {
    pub fn algorithm(&self) -> Algorithm {
        self.parameters.algorithm()
    }

    pub fn predict_row(&self, row: &[f64]) -> Result<Prediction> {
        if row.len() != self.features.len() {
            return Err(Error::WidthMismatch {
                expected: self.features.len(),
                found: row.len(),
            });
        }
        match &self.parameters {
            ModelParameters::Logistic(m) => logistic::predict_logistic(m, row),
            ModelParameters::NaiveBayes(m) => bayes::predict_naive_bayes(m, row),
            ModelParameters::Svm(m) => svm::predict_svm(m, row),
            ModelParameters::Tree(m) => tree::predict_tree(m, row),
            ModelParameters::Forest(m) => forest::predict_forest(m, row),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: TrainedModel = serde_json::from_str(s)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported model format_version {}",
                m.format_version
            )));
        }
        if m.hyperparams.algorithm() != m.algorithm() {
            return Err(Error::Config(format!(
                "model hyperparams are for {} but parameters are for {}",
                m.hyperparams.algorithm(),
                m.algorithm()
            )));
        }
        let width = m.features.len();
        match &m.parameters {
            ModelParameters::Tree(t) => t.validate(width)?,
            ModelParameters::Forest(f) => {
                for t in &f.trees {
                    t.validate(width)?;
                }
            }
            _ => {}
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut s = self.to_json()?;
        s.push('\n');
        std::fs::write(path, s).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

/// Trains the classifier selected by `hp` on every feature column of `t`.
pub fn train(t: &Table, hp: &Hyperparams) -> Result<TrainedModel> {
    hp.validate()?;
    let data = Dataset::from_table(t)?;
    let parameters = match hp {
        Hyperparams::Logistic(p) => ModelParameters::Logistic(logistic::train_logistic(&data, p)?),
        Hyperparams::NaiveBayes(p) => {
            ModelParameters::NaiveBayes(bayes::train_naive_bayes(&data, p)?)
        }
        Hyperparams::Svm(p) => ModelParameters::Svm(svm::train_svm(&data, p)?),
        Hyperparams::Tree(p) => ModelParameters::Tree(tree::train_tree(&data, p)?),
        Hyperparams::Forest(p) => ModelParameters::Forest(forest::train_forest(&data, p)?),
    };
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        parameters,
        hyperparams: hp.clone(),
        features: t.feature_names(),
        schema_fingerprint: schema_fingerprint(t),
    })
}

/// Row-wise predictions. The table's feature columns must match the model's
/// manifest exactly, in order; nothing is reordered.
pub fn predict(m: &TrainedModel, t: &Table) -> Result<Vec<Prediction>> {
    let names = t.feature_names();
    if names != m.features || schema_fingerprint(t) != m.schema_fingerprint {
        return Err(Error::ManifestMismatch {
            expected: m.features.clone(),
            found: names,
        });
    }
    (0..t.row_count())
        .map(|r| m.predict_row(&t.feature_row(r)))
        .collect()
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn require_both_classes(algorithm: &'static str, data: &Dataset) -> Result<()> {
    let [benign, attack] = data.class_counts();
    if benign == 0 || attack == 0 {
        return Err(Error::training(
            algorithm,
            format!("training data needs both classes (benign {benign}, attack {attack})"),
        ));
    }
    Ok(())
}
