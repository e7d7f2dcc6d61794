//! Pipeline configuration. JSON, with unknown keys rejected.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classify::{
    Algorithm, BayesParams, ForestParams, Hyperparams, LogisticParams, SvmParams, TreeParams,
};
use crate::discretizer::DEFAULT_BIN_COUNT;
use crate::error::{Error, Result};
use crate::fselect::THRESHOLD_GRID;
use crate::sampling::{Scheme, SplitSpec};

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "FLOWSEL_OUT_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackConfig {
    /// Short name used in file names and reports, e.g. `ftp`.
    pub name: String,
    /// Label text as it appears in the label column.
    pub label: String,
    /// Defaults by name: `ftp` and `ssh` use fraction_stratified, `web`,
    /// `xss` and `sql` use minority_protect. Other names must set it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
}

impl AttackConfig {
    pub fn resolved_scheme(&self) -> Result<Scheme> {
        if let Some(s) = self.scheme {
            return Ok(s);
        }
        match self.name.to_ascii_lowercase().as_str() {
            "ftp" | "ssh" => Ok(Scheme::FractionStratified),
            "web" | "xss" | "sql" => Ok(Scheme::MinorityProtect),
            _ => Err(Error::Config(format!(
                "attack {:?} has no default sampling scheme; set \"scheme\"",
                self.name
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub train_fraction: f64,
    pub test_fraction: f64,
    /// Share of attack rows used for training under minority_protect.
    pub attack_train_fraction: f64,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            train_fraction: 0.2,
            test_fraction: 0.1,
            attack_train_fraction: 0.7,
            seed: 42,
        }
    }
}

impl SamplingConfig {
    pub fn spec(&self, scheme: Scheme) -> SplitSpec {
        match scheme {
            Scheme::FractionStratified => {
                SplitSpec::fraction_stratified(self.train_fraction, self.test_fraction, self.seed)
            }
            Scheme::MinorityProtect => SplitSpec::minority_protect(
                self.attack_train_fraction,
                self.train_fraction,
                self.test_fraction,
                self.seed,
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    /// Which classifiers to train, in report order.
    pub enabled: Vec<Algorithm>,
    /// Seed handed to every classifier; replaces the `seed` field of the
    /// per-algorithm settings below.
    pub seed: u64,
    pub logistic: LogisticParams,
    pub naive_bayes: BayesParams,
    pub svm: SvmParams,
    pub tree: TreeParams,
    pub forest: ForestParams,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            enabled: Algorithm::ALL.to_vec(),
            seed: 42,
            logistic: LogisticParams::default(),
            naive_bayes: BayesParams::default(),
            svm: SvmParams::default(),
            tree: TreeParams::default(),
            forest: ForestParams::default(),
        }
    }
}

impl ClassifierConfig {
    pub fn hyperparams(&self, algorithm: Algorithm) -> Hyperparams {
        let hp = match algorithm {
            Algorithm::Logistic => Hyperparams::Logistic(self.logistic.clone()),
            Algorithm::NaiveBayes => Hyperparams::NaiveBayes(self.naive_bayes.clone()),
            Algorithm::Svm => Hyperparams::Svm(self.svm.clone()),
            Algorithm::Tree => Hyperparams::Tree(self.tree.clone()),
            Algorithm::Forest => Hyperparams::Forest(self.forest.clone()),
        };
        hp.with_seed(self.seed)
    }
}

fn default_label_column() -> String {
    "Label".into()
}

fn default_exclude() -> Vec<String> {
    vec!["Timestamp".into()]
}

fn default_benign() -> String {
    "Benign".into()
}

fn default_bins() -> usize {
    DEFAULT_BIN_COUNT
}

fn default_thresholds() -> Vec<f64> {
    THRESHOLD_GRID.to_vec()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("flowsel-out")
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// CSV files merged in the given order. Relative paths are resolved
    /// against the config file's directory by [`PipelineConfig::load`].
    pub inputs: Vec<PathBuf>,
    #[serde(default = "default_label_column")]
    pub label_column: String,
    /// Columns dropped by name before cleaning. Single-valued columns are
    /// dropped regardless.
    #[serde(default = "default_exclude")]
    pub exclude_columns: Vec<String>,
    #[serde(default = "default_benign")]
    pub benign_label: String,
    pub attacks: Vec<AttackConfig>,
    /// Keep only benign rows from the input files that contain the attack.
    #[serde(default = "yes")]
    pub benign_from_attack_files: bool,
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// Relief sample size; `min(rows, 5000)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relief_m: Option<usize>,
    #[serde(default)]
    pub relief_seed: u64,
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub classifiers: ClassifierConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Also write the train and test tables of every split as CSV.
    #[serde(default = "yes")]
    pub write_split_tables: bool,
}

/// Command-line overrides applied on top of a loaded config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub attacks: Option<Vec<String>>,
    pub thresholds: Option<Vec<f64>>,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads, resolves relative input paths and validates.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for input in &mut cfg.inputs {
            if input.is_relative() {
                *input = base.join(&*input);
            }
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies CLI overrides; the output directory precedence is
    /// `--out`, then the environment variable, then the config value.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.sampling.seed = seed;
            self.classifiers.seed = seed;
        }
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        } else if let Some(env) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
            self.output_dir = PathBuf::from(env);
        }
        if let Some(names) = &o.attacks {
            for n in names {
                if !self.attacks.iter().any(|a| &a.name == n) {
                    return Err(Error::Config(format!(
                        "--attacks names unknown attack {n:?}"
                    )));
                }
            }
            self.attacks.retain(|a| names.contains(&a.name));
        }
        if let Some(t) = &o.thresholds {
            self.thresholds = t.clone();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.inputs.is_empty() {
            return bad("no input files".into());
        }
        if self.attacks.is_empty() {
            return bad("no attacks configured".into());
        }
        let mut names = BTreeSet::new();
        for a in &self.attacks {
            if a.name.is_empty()
                || !a
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return bad(format!(
                    "attack name {:?} must be non-empty ASCII letters, digits, '-' or '_'",
                    a.name
                ));
            }
            if !names.insert(a.name.as_str()) {
                return bad(format!("attack name {:?} appears twice", a.name));
            }
            if a.label == self.benign_label {
                return bad(format!("attack {:?} uses the benign label", a.name));
            }
            let spec = self.sampling.spec(a.resolved_scheme()?);
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.thresholds.is_empty() {
            return bad("threshold grid is empty".into());
        }
        if let Some(t) = self.thresholds.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return bad(format!("threshold {t} is outside (0, 1)"));
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return bad("threshold grid must be strictly increasing".into());
        }
        if self.bins < 2 {
            return bad(format!("bins must be at least 2, got {}", self.bins));
        }
        if self.relief_m == Some(0) {
            return bad("relief_m must be positive".into());
        }
        if self.classifiers.enabled.is_empty() {
            return bad("no classifiers enabled".into());
        }
        let mut seen = BTreeSet::new();
        for &alg in &self.classifiers.enabled {
            if !seen.insert(alg) {
                return bad(format!("classifier {alg} enabled twice"));
            }
            self.classifiers.hyperparams(alg).validate()?;
        }
        for input in &self.inputs {
            if same_path(input, &self.output_dir) {
                return bad(format!(
                    "input {} coincides with the output directory",
                    input.display()
                ));
            }
        }
        Ok(())
    }

    /// First 12 hex digits of the SHA-256 of the canonical config JSON.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))[..12].to_string()
    }
}

fn same_path(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// Threshold as used in file names and reports: two decimals when that is
/// exact, otherwise the shortest round-trip form.
pub fn format_threshold(t: f64) -> String {
    let two = format!("{t:.2}");
    if two.parse::<f64>() == Ok(t) {
        two
    } else {
        t.to_string()
    }
}

/// Parses a comma-separated threshold list such as `0.35,0.4`.
pub fn parse_thresholds(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad threshold {p:?}")))
        })
        .collect()
}
