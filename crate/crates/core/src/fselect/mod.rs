//! Filter feature selection: six per-feature scorers, per-method min-max
//! normalization of the scores, mean aggregation and threshold selection.

pub mod anova;
pub mod info;
pub mod relief;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretizer::{apply_bins, equal_width_bins, BinEdges};
use crate::error::{Error, Result};
use crate::tabular::Table;

pub use anova::{anova, anova_f, AnovaTable, GroupStats, GroupSummary};
pub use info::{
    chi_squared, class_entropy, conditional_entropy, entropy, gain_ratio, information_gain,
    split_info, symmetric_uncertainty, ContingencyTable,
};
pub use relief::{relief, relief_weights, ReliefState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    InformationGain,
    GainRatio,
    Relief,
    SymmetricUncertainty,
    ChiSquared,
    AnovaF,
}

/// Column order used everywhere scores are laid out.
pub const METHODS: [Method; 6] = [
    Method::InformationGain,
    Method::GainRatio,
    Method::Relief,
    Method::SymmetricUncertainty,
    Method::ChiSquared,
    Method::AnovaF,
];

impl Method {
    pub fn column(self) -> &'static str {
        match self {
            Method::InformationGain => "ig",
            Method::GainRatio => "gain_ratio",
            Method::Relief => "relief",
            Method::SymmetricUncertainty => "su",
            Method::ChiSquared => "chi2",
            Method::AnovaF => "anova_f",
        }
    }
}

pub const THRESHOLD_GRID: [f64; 5] = [0.35, 0.40, 0.45, 0.50, 0.55];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub index: usize,
    pub name: String,
    /// Raw scores in [`METHODS`] order. ANOVA may be `+∞`.
    pub raw: [f64; 6],
    pub normalized: Option<[f64; 6]>,
    pub mean_score: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub features: Vec<FeatureScore>,
    pub warnings: Vec<String>,
}

impl ScoreMatrix {
    pub fn raw_column(&self, method: Method) -> Vec<f64> {
        let j = METHODS.iter().position(|&m| m == method).unwrap();
        self.features.iter().map(|f| f.raw[j]).collect()
    }

    /// Features ordered by descending mean score, ties by ascending index.
    pub fn ranking(&self) -> Vec<&FeatureScore> {
        let mut v: Vec<&FeatureScore> = self.features.iter().collect();
        v.sort_by(|a, b| {
            let (x, y) = (a.mean_score.unwrap_or(0.0), b.mean_score.unwrap_or(0.0));
            y.total_cmp(&x).then(a.index.cmp(&b.index))
        });
        v
    }

    /// The normalized-score CSV: six decimals, one row per feature in index
    /// order.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from(
            "feature_index,feature_name,ig,gain_ratio,relief,su,chi2,anova_f,mean_score\n",
        );
        for f in &self.features {
            let (norm, mean) = f.normalized.zip(f.mean_score).ok_or_else(|| {
                Error::Scorer("scores must be normalized and aggregated before export".into())
            })?;
            let name = if f.name.contains([',', '"', '\n']) {
                format!("\"{}\"", f.name.replace('"', "\"\""))
            } else {
                f.name.clone()
            };
            let _ = write!(out, "{},{}", f.index, name);
            for v in norm {
                let _ = write!(out, ",{v:.6}");
            }
            let _ = writeln!(out, ",{mean:.6}");
        }
        Ok(out)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }
}

/// Equal-width edges for every feature; `None` for constant features.
pub fn compute_bins(t: &Table, k: usize) -> Result<Vec<Option<BinEdges>>> {
    t.features()
        .map(|c| {
            if relief::is_constant(&c.values) {
                Ok(None)
            } else {
                equal_width_bins(&c.name, &c.values, k).map(Some)
            }
        })
        .collect()
}

fn codes_for(values: &[f64], edges: Option<&BinEdges>) -> Vec<usize> {
    match edges {
        Some(e) => apply_bins(values, e),
        None => vec![0; values.len()],
    }
}

/// Raw scores for every feature of a cleaned, normalized, binary table.
///
/// The four contingency scorers use the binned feature, ANOVA the continuous
/// values grouped by class, Relief the continuous values for neighbour search
/// and the binned values for the difference indicator. A single Relief sample
/// drawn from `seed` is shared by all features.
pub fn score_all(
    t: &Table,
    bins: &[Option<BinEdges>],
    relief_m: usize,
    seed: u64,
) -> Result<ScoreMatrix> {
    let classes = t.binary_labels()?;
    if bins.len() != t.feature_count() {
        return Err(Error::Scorer(format!(
            "{} bin sets for {} features",
            bins.len(),
            t.feature_count()
        )));
    }
    let features: Vec<_> = t.features().collect();
    let codes: Vec<Vec<usize>> = features
        .par_iter()
        .zip(bins)
        .map(|(c, b)| codes_for(&c.values, b.as_ref()))
        .collect();
    let relief = relief::relief(t, &codes, relief_m, seed)?;

    let scored: Vec<Result<FeatureScore>> = features
        .par_iter()
        .enumerate()
        .map(|(index, col)| {
            let k = bins[index].as_ref().map_or(1, |b| b.k);
            let ct = ContingencyTable::from_codes(&codes[index], &classes, k)?;
            let groups = GroupStats::by_class(&col.values, &classes)?;
            Ok(FeatureScore {
                index,
                name: col.name.clone(),
                raw: [
                    information_gain(&ct),
                    gain_ratio(&ct),
                    relief.weights[index],
                    symmetric_uncertainty(&ct),
                    chi_squared(&ct),
                    anova_f(&groups),
                ],
                normalized: None,
                mean_score: None,
            })
        })
        .collect();
    let features = scored.into_iter().collect::<Result<Vec<_>>>()?;
    let warnings = features
        .iter()
        .filter(|f| bins[f.index].is_none())
        .map(|f| {
            format!(
                "feature {} ({}) is constant; gain ratio defined as 0",
                f.index, f.name
            )
        })
        .collect();
    Ok(ScoreMatrix { features, warnings })
}

/// Min-max rescales each method's scores across features onto [0,1].
/// `+∞` is replaced by the largest finite score of its column first; a
/// constant column becomes all zeros.
pub fn normalize_scores(raw: &ScoreMatrix) -> ScoreMatrix {
    let mut out = raw.clone();
    let mut normalized = vec![[0.0f64; 6]; raw.features.len()];
    for (j, method) in METHODS.iter().enumerate() {
        let column: Vec<f64> = raw.features.iter().map(|f| f.raw[j]).collect();
        let finite_max = column
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let column: Vec<f64> = column
            .into_iter()
            .map(|v| if v == f64::INFINITY { finite_max } else { v })
            .collect();
        let min = column.iter().copied().fold(f64::INFINITY, f64::min);
        let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(min.is_finite() && max.is_finite() && max > min) {
            out.warnings.push(format!(
                "{} scores are constant across features; normalized to 0",
                method.column()
            ));
            continue;
        }
        let range = max - min;
        for (row, v) in normalized.iter_mut().zip(column) {
            row[j] = (v - min) / range;
        }
    }
    for (f, n) in out.features.iter_mut().zip(normalized) {
        f.normalized = Some(n);
        f.mean_score = None;
    }
    out
}

/// Adds the arithmetic mean of the six normalized scores to every feature.
pub fn aggregate_mean(norm: &ScoreMatrix) -> Result<ScoreMatrix> {
    let mut out = norm.clone();
    for f in &mut out.features {
        let n = f
            .normalized
            .ok_or_else(|| Error::Scorer("aggregate_mean needs normalized scores".into()))?;
        f.mean_score = Some(n.iter().sum::<f64>() / 6.0);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeature {
    pub index: usize,
    pub name: String,
    pub mean_score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSelection {
    pub threshold: f64,
    pub features: Vec<SelectedFeature>,
}

impl ThresholdSelection {
    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.features.iter().map(|f| f.index).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Features whose mean score is at least `threshold`, best first.
pub fn select_by_threshold(s: &ScoreMatrix, threshold: f64) -> Result<ThresholdSelection> {
    if s.features.iter().any(|f| f.mean_score.is_none()) {
        return Err(Error::Scorer(
            "select_by_threshold needs mean scores".into(),
        ));
    }
    let features = s
        .ranking()
        .into_iter()
        .filter(|f| f.mean_score.unwrap() >= threshold)
        .map(|f| SelectedFeature {
            index: f.index,
            name: f.name.clone(),
            mean_score: f.mean_score.unwrap(),
        })
        .collect();
    Ok(ThresholdSelection {
        threshold,
        features,
    })
}

/// Bins, raw scores, normalization and aggregation in one call.
pub fn rank_features(
    t: &Table,
    k: usize,
    relief_m: usize,
    seed: u64,
) -> Result<(ScoreMatrix, Vec<Option<BinEdges>>)> {
    let bins = compute_bins(t, k)?;
    let raw = score_all(t, &bins, relief_m, seed)?;
    Ok((aggregate_mean(&normalize_scores(&raw))?, bins))
}
