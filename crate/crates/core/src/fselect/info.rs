//! Contingency-table scorers: entropy, information gain, gain ratio,
//! symmetric uncertainty and chi-squared.
//!
//! Rows of a contingency table are feature intervals (X), columns are classes
//! (Y). All entropies are in bits.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_totals: Vec<u64>,
    column_totals: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        let width = counts.first().map_or(0, Vec::len);
        if width == 0 || counts.iter().any(|r| r.len() != width) {
            return Err(Error::Scorer(
                "contingency table must be a non-empty rectangle".into(),
            ));
        }
        let row_totals: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let column_totals: Vec<u64> = (0..width)
            .map(|j| counts.iter().map(|r| r[j]).sum())
            .collect();
        let total = row_totals.iter().sum();
        if total == 0 {
            return Err(Error::Scorer("contingency table has no instances".into()));
        }
        Ok(ContingencyTable {
            counts,
            row_totals,
            column_totals,
            total,
        })
    }

    /// Tallies interval codes against class codes.
    pub fn from_codes(intervals: &[usize], classes: &[u8], n_intervals: usize) -> Result<Self> {
        if intervals.len() != classes.len() {
            return Err(Error::LengthMismatch {
                left: intervals.len(),
                right: classes.len(),
            });
        }
        let n_classes = classes
            .iter()
            .map(|&c| c as usize + 1)
            .max()
            .unwrap_or(1)
            .max(2);
        let n_intervals = intervals
            .iter()
            .map(|&i| i + 1)
            .max()
            .unwrap_or(1)
            .max(n_intervals);
        let mut counts = vec![vec![0u64; n_classes]; n_intervals];
        for (&i, &c) in intervals.iter().zip(classes) {
            counts[i][c as usize] += 1;
        }
        ContingencyTable::new(counts)
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn column_totals(&self) -> &[u64] {
        &self.column_totals
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn transpose(&self) -> ContingencyTable {
        let counts = (0..self.column_totals.len())
            .map(|j| self.counts.iter().map(|r| r[j]).collect())
            .collect();
        ContingencyTable {
            counts,
            row_totals: self.column_totals.clone(),
            column_totals: self.row_totals.clone(),
            total: self.total,
        }
    }

    /// Copy without all-zero rows and columns.
    pub fn pruned(&self) -> ContingencyTable {
        let cols: Vec<usize> = (0..self.column_totals.len())
            .filter(|&j| self.column_totals[j] > 0)
            .collect();
        let counts: Vec<Vec<u64>> = self
            .counts
            .iter()
            .zip(&self.row_totals)
            .filter(|(_, &t)| t > 0)
            .map(|(r, _)| cols.iter().map(|&j| r[j]).collect())
            .collect();
        ContingencyTable::new(counts).expect("total is unchanged by pruning")
    }
}

fn entropy_of(counts: &[u64], total: u64) -> f64 {
    let n = total as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Shannon entropy of a count vector, with `0·log 0 = 0`.
pub fn entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Scorer("entropy of an all-zero count vector".into()));
    }
    Ok(entropy_of(counts, total).max(0.0))
}

/// H(Y): entropy of the class distribution.
pub fn class_entropy(ct: &ContingencyTable) -> f64 {
    entropy_of(&ct.column_totals, ct.total).max(0.0)
}

/// H(Y|X) = Σᵢ (Rᵢ/N)·H(Y | X = i).
pub fn conditional_entropy(ct: &ContingencyTable) -> f64 {
    let n = ct.total as f64;
    ct.counts
        .iter()
        .zip(&ct.row_totals)
        .filter(|(_, &r)| r > 0)
        .map(|(row, &r)| (r as f64 / n) * entropy_of(row, r))
        .sum::<f64>()
        .max(0.0)
}

/// IG = H(Y) − H(Y|X), clamped at zero against rounding.
pub fn information_gain(ct: &ContingencyTable) -> f64 {
    (class_entropy(ct) - conditional_entropy(ct)).max(0.0)
}

/// Entropy of the interval distribution {Rᵢ/N}, i.e. H(X).
pub fn split_info(ct: &ContingencyTable) -> f64 {
    entropy_of(&ct.row_totals, ct.total).max(0.0)
}

/// IG / SplitInfo, or 0 for a single-valued feature (SplitInfo = 0).
pub fn gain_ratio(ct: &ContingencyTable) -> f64 {
    let si = split_info(ct);
    if si == 0.0 {
        0.0
    } else {
        information_gain(ct) / si
    }
}

/// 2·IG / (H(X) + H(Y)), or 0 when both entropies vanish.
pub fn symmetric_uncertainty(ct: &ContingencyTable) -> f64 {
    let denom = split_info(ct) + class_entropy(ct);
    if denom == 0.0 {
        0.0
    } else {
        (2.0 * information_gain(ct) / denom).clamp(0.0, 1.0)
    }
}

/// Pearson's χ² against the independence expectation `Rᵢ·Bⱼ/N`, after
/// removing empty intervals and classes.
pub fn chi_squared(ct: &ContingencyTable) -> f64 {
    let ct = ct.pruned();
    let n = ct.total as f64;
    let mut chi = 0.0;
    for (row, &r) in ct.counts.iter().zip(&ct.row_totals) {
        for (&a, &b) in row.iter().zip(&ct.column_totals) {
            let expected = (r as f64 * b as f64) / n;
            let d = a as f64 - expected;
            chi += d * d / expected;
        }
    }
    chi
}
