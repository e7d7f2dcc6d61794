//! Equal-width binning of continuous features for the contingency-table
//! scorers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BIN_COUNT: usize = 10;

/// Interior cut points of a `k`-bin partition. Values below the first edge
/// fall in bin 0; a value equal to an edge belongs to the higher bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinEdges {
    pub feature: String,
    pub k: usize,
    pub edges: Vec<f64>,
}

impl BinEdges {
    pub fn bin(&self, value: f64) -> usize {
        self.edges.partition_point(|&e| e <= value)
    }
}

/// Edges at `min + i·(max − min)/k` for `i = 1..k`, computed on this column.
pub fn equal_width_bins(feature: &str, column: &[f64], k: usize) -> Result<BinEdges> {
    if k < 2 {
        return Err(Error::Discretizer(format!(
            "bin count must be >= 2, got {k}"
        )));
    }
    if column.iter().any(|v| !v.is_finite()) {
        return Err(Error::Discretizer(format!(
            "feature {feature:?} has non-finite values"
        )));
    }
    let min = column.iter().copied().fold(f64::INFINITY, f64::min);
    let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if column.is_empty() || max == min {
        return Err(Error::Discretizer(format!(
            "feature {feature:?} is constant"
        )));
    }
    let range = max - min;
    // i·range is exact for the common [0,1] case, so the division yields the
    // correctly rounded i/k and bins agree with ⌊k·x⌋ on grid points.
    let edges: Vec<f64> = (1..k)
        .map(|i| min + (i as f64 * range) / k as f64)
        .collect();
    if edges.windows(2).any(|w| w[0] >= w[1]) || edges[0] <= min {
        return Err(Error::Discretizer(format!(
            "feature {feature:?} range {range:e} is too narrow for {k} bins"
        )));
    }
    Ok(BinEdges {
        feature: feature.to_string(),
        k,
        edges,
    })
}

pub fn apply_bins(column: &[f64], edges: &BinEdges) -> Vec<usize> {
    column.iter().map(|&v| edges.bin(v)).collect()
}
