//! Relief feature weighting for binary class problems.
//!
//! Neighbours are searched by Manhattan distance over the continuous
//! (normalized) feature values. The per-feature difference used in the weight
//! update is the 0/1 inequality indicator applied to the discretized values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretizer::{apply_bins, equal_width_bins};
use crate::error::{Error, Result};
use crate::tabular::Table;

pub const DEFAULT_SAMPLE_CAP: usize = 5000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReliefState {
    pub m: usize,
    pub seed: u64,
    pub weights: Vec<f64>,
    pub metric: String,
}

/// `min(rows, 5000)`.
pub fn default_sample_size(rows: usize) -> usize {
    rows.min(DEFAULT_SAMPLE_CAP)
}

/// Seeded sample of `m` distinct row indices.
pub fn draw_sample(rows: usize, m: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::index::sample(&mut rng, rows, m).into_vec()
}

/// Nearest hit and nearest miss of row `r`. Ties go to the lowest row index;
/// the row itself is never its own hit.
fn neighbours(rows: &[Vec<f64>], classes: &[u8], r: usize) -> (Option<usize>, Option<usize>) {
    let target = &rows[r];
    let mut hit: Option<(f64, usize)> = None;
    let mut miss: Option<(f64, usize)> = None;
    for (j, row) in rows.iter().enumerate() {
        if j == r {
            continue;
        }
        let d: f64 = row.iter().zip(target).map(|(a, b)| (a - b).abs()).sum();
        let slot = if classes[j] == classes[r] {
            &mut hit
        } else {
            &mut miss
        };
        if slot.is_none_or(|(best, _)| d < best) {
            *slot = Some((d, j));
        }
    }
    (hit.map(|h| h.1), miss.map(|m| m.1))
}

/// Relief weights given explicit row-major continuous values, column-major
/// discrete codes and a pre-drawn sample.
///
/// Each weight is `(#miss differences − #hit differences) / m`, which is the
/// iterative `W − D(R,H)/m + D(R,M)/m` update summed in exact integer
/// arithmetic.
pub fn relief_with_sample(
    rows: &[Vec<f64>],
    codes: &[Vec<usize>],
    classes: &[u8],
    sample: &[usize],
) -> Result<Vec<f64>> {
    if rows.len() != classes.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: classes.len(),
        });
    }
    if sample.is_empty() {
        return Err(Error::Scorer(
            "Relief needs a sample of at least one row".into(),
        ));
    }
    let per_class = [0u8, 1u8].map(|c| classes.iter().filter(|&&k| k == c).count());
    if per_class.iter().any(|&n| n < 2) {
        return Err(Error::Scorer(format!(
            "Relief needs at least two rows per class, got {} benign / {} attack",
            per_class[0], per_class[1]
        )));
    }
    if classes.iter().any(|&c| c > 1) {
        return Err(Error::Scorer("Relief supports binary labels only".into()));
    }
    let features = codes.len();
    let diffs = sample
        .par_iter()
        .map(|&r| {
            let (hit, miss) = neighbours(rows, classes, r);
            let (hit, miss) = (
                hit.expect("class has two rows"),
                miss.expect("both classes present"),
            );
            codes
                .iter()
                .map(|col| (col[r] != col[miss]) as i64 - (col[r] != col[hit]) as i64)
                .collect::<Vec<i64>>()
        })
        .reduce(
            || vec![0i64; features],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let m = sample.len() as f64;
    Ok(diffs.into_iter().map(|d| d as f64 / m).collect())
}

/// Relief over the feature columns of a binary, normalized table.
///
/// `discrete` holds one code vector per feature (see [`discrete_codes`]).
pub fn relief(t: &Table, discrete: &[Vec<usize>], m: usize, seed: u64) -> Result<ReliefState> {
    let classes = t.binary_labels()?;
    let n = t.row_count();
    if m == 0 || m > n {
        return Err(Error::Scorer(format!(
            "Relief sample size must be in 1..={n}, got {m}"
        )));
    }
    if discrete.len() != t.feature_count() {
        return Err(Error::Scorer(
            "one discrete code vector per feature required".into(),
        ));
    }
    let sample = draw_sample(n, m, seed);
    let weights = relief_with_sample(&t.feature_rows(), discrete, &classes, &sample)?;
    Ok(ReliefState {
        m,
        seed,
        weights,
        metric: "manhattan".into(),
    })
}

/// Equal-width codes for each feature; constant features map to bin 0.
pub fn discrete_codes(t: &Table, k: usize) -> Result<Vec<Vec<usize>>> {
    t.features()
        .map(|c| match equal_width_bins(&c.name, &c.values, k) {
            Ok(edges) => Ok(apply_bins(&c.values, &edges)),
            Err(_) if is_constant(&c.values) => Ok(vec![0; c.values.len()]),
            Err(e) => Err(e),
        })
        .collect()
}

pub(crate) fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Relief with codes from `k` equal-width bins.
pub fn relief_weights(t: &Table, m: usize, seed: u64, k: usize) -> Result<ReliefState> {
    let codes = discrete_codes(t, k)?;
    relief(t, &codes, m, seed)
}
