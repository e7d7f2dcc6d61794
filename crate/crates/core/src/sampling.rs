//! Seeded, stratified train/test construction.
//!
//! The PRNG is ChaCha8 seeded through `SeedableRng::seed_from_u64`; each class
//! is shuffled with a Fisher-Yates pass (`SliceRandom::shuffle`) and the
//! train/test rows are taken as consecutive prefixes of the shuffled order.
//! Selected rows are emitted in ascending source order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabular::Table;

pub const SAMPLER_ALGORITHM: &str = "chacha8-fisher-yates-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Same fraction of every class for train, then for test.
    FractionStratified,
    /// Attack rows split by `attack_train_fraction`, benign rows by the
    /// train/test fractions.
    MinorityProtect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub scheme: Scheme,
    pub train_fraction: f64,
    pub test_fraction: f64,
    pub attack_train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn fraction_stratified(train: f64, test: f64, seed: u64) -> Self {
        SplitSpec {
            scheme: Scheme::FractionStratified,
            train_fraction: train,
            test_fraction: test,
            attack_train_fraction: 0.7,
            seed,
        }
    }

    pub fn minority_protect(attack_train: f64, train: f64, test: f64, seed: u64) -> Self {
        SplitSpec {
            scheme: Scheme::MinorityProtect,
            train_fraction: train,
            test_fraction: test,
            attack_train_fraction: attack_train,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.train_fraction) || !open_unit(self.test_fraction) {
            return Err(Error::Config(format!(
                "train/test fractions must lie in (0,1), got {} / {}",
                self.train_fraction, self.test_fraction
            )));
        }
        if self.train_fraction + self.test_fraction > 1.0 {
            return Err(Error::Config(format!(
                "train + test fraction exceeds 1 ({} + {})",
                self.train_fraction, self.test_fraction
            )));
        }
        if self.scheme == Scheme::MinorityProtect && !open_unit(self.attack_train_fraction) {
            return Err(Error::Config(format!(
                "attack_train_fraction must lie in (0,1), got {}",
                self.attack_train_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub benign: usize,
    pub attack: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.benign + self.attack
    }
}

#[derive(Clone, Debug)]
pub struct SplitResult {
    pub train: Table,
    pub test: Table,
    /// Positions (into the source table) of the train and test rows.
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub train_counts: ClassCounts,
    pub test_counts: ClassCounts,
}

/// The JSON manifest emitted next to split CSVs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub scheme: Scheme,
    pub train_fraction: f64,
    pub test_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attack_train_fraction: Option<f64>,
    pub seed: u64,
    pub algorithm: String,
    pub train_counts: ClassCounts,
    pub test_counts: ClassCounts,
}

impl SplitResult {
    pub fn manifest(&self, spec: &SplitSpec) -> SplitManifest {
        SplitManifest {
            scheme: spec.scheme,
            train_fraction: spec.train_fraction,
            test_fraction: spec.test_fraction,
            attack_train_fraction: (spec.scheme == Scheme::MinorityProtect)
                .then_some(spec.attack_train_fraction),
            seed: spec.seed,
            algorithm: SAMPLER_ALGORITHM.to_string(),
            train_counts: self.train_counts,
            test_counts: self.test_counts,
        }
    }
}

fn floor_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64).floor() as usize
}

struct ClassDraw {
    train: usize,
    test: usize,
}

fn draw(
    t: &Table,
    spec: &SplitSpec,
    plan: impl Fn(u8, usize) -> Result<ClassDraw>,
) -> Result<SplitResult> {
    let labels = t.binary_labels()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train_rows = Vec::new();
    let mut test_rows = Vec::new();
    let mut train_counts = ClassCounts::default();
    let mut test_counts = ClassCounts::default();
    for class in [0u8, 1u8] {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&r| labels[r] == class).collect();
        let ClassDraw { train, test } = plan(class, rows.len())?;
        let name = if class == 0 { "benign" } else { "attack" };
        if train == 0 {
            return Err(Error::Sampling(format!(
                "{name} class would vanish from train ({} rows available)",
                rows.len()
            )));
        }
        if test == 0 {
            return Err(Error::Sampling(format!(
                "{name} class would vanish from test ({} rows available)",
                rows.len()
            )));
        }
        debug_assert!(train + test <= rows.len());
        rows.shuffle(&mut rng);
        train_rows.extend_from_slice(&rows[..train]);
        test_rows.extend_from_slice(&rows[train..train + test]);
        let (tr, ts) = if class == 0 {
            (&mut train_counts.benign, &mut test_counts.benign)
        } else {
            (&mut train_counts.attack, &mut test_counts.attack)
        };
        *tr = train;
        *ts = test;
    }
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok(SplitResult {
        train: t.select_rows(&train_rows),
        test: t.select_rows(&test_rows),
        train_rows,
        test_rows,
        train_counts,
        test_counts,
    })
}

/// Draws `⌊train_fraction · n_c⌋` rows of each class for train and
/// `⌊test_fraction · n_c⌋` of the remaining rows for test, without
/// replacement.
pub fn fraction_stratified_split(t: &Table, spec: &SplitSpec) -> Result<SplitResult> {
    spec.validate()?;
    if spec.scheme != Scheme::FractionStratified {
        return Err(Error::Config(
            "split scheme is not fraction_stratified".into(),
        ));
    }
    draw(t, spec, |class, n| {
        if n == 0 {
            return Err(Error::Sampling(format!(
                "class {class} has no rows in the source table"
            )));
        }
        Ok(ClassDraw {
            train: floor_count(spec.train_fraction, n),
            test: floor_count(spec.test_fraction, n),
        })
    })
}

/// Splits every attack row between train (`⌊attack_train_fraction · n⌋`) and
/// test (the rest); benign rows are drawn as in the stratified scheme.
pub fn minority_protect_split(t: &Table, spec: &SplitSpec) -> Result<SplitResult> {
    spec.validate()?;
    if spec.scheme != Scheme::MinorityProtect {
        return Err(Error::Config("split scheme is not minority_protect".into()));
    }
    draw(t, spec, |class, n| {
        if n == 0 {
            let name = if class == 0 { "benign" } else { "attack" };
            return Err(Error::Sampling(format!(
                "no {name} rows in the source table"
            )));
        }
        Ok(if class == 1 {
            let train = floor_count(spec.attack_train_fraction, n);
            ClassDraw {
                train,
                test: n - train,
            }
        } else {
            ClassDraw {
                train: floor_count(spec.train_fraction, n),
                test: floor_count(spec.test_fraction, n),
            }
        })
    })
}

pub fn split(t: &Table, spec: &SplitSpec) -> Result<SplitResult> {
    match spec.scheme {
        Scheme::FractionStratified => fraction_stratified_split(t, spec),
        Scheme::MinorityProtect => minority_protect_split(t, spec),
    }
}
