//! One-way ANOVA F statistic of a feature grouped by class.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample variance (n − 1 denominator); 0 for a single-element group.
    pub variance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupStats {
    pub groups: Vec<GroupSummary>,
    pub grand_mean: f64,
    pub total: usize,
}

impl GroupStats {
    pub fn from_groups(groups: &[&[f64]]) -> Result<Self> {
        let summaries: Vec<GroupSummary> = groups
            .iter()
            .filter(|g| !g.is_empty())
            .map(|g| {
                let n = g.len();
                let mean = g.iter().sum::<f64>() / n as f64;
                let variance = if n > 1 {
                    g.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
                } else {
                    0.0
                };
                GroupSummary { n, mean, variance }
            })
            .collect();
        let total: usize = summaries.iter().map(|g| g.n).sum();
        if summaries.len() < 2 {
            return Err(Error::Scorer(format!(
                "ANOVA needs at least two non-empty groups, got {}",
                summaries.len()
            )));
        }
        if total <= summaries.len() {
            return Err(Error::Scorer(format!(
                "ANOVA needs more instances than groups (N = {total}, K = {})",
                summaries.len()
            )));
        }
        let grand_mean = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / total as f64;
        Ok(GroupStats {
            groups: summaries,
            grand_mean,
            total,
        })
    }

    /// Groups a value column by binary class label.
    pub fn by_class(values: &[f64], classes: &[u8]) -> Result<Self> {
        if values.len() != classes.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: classes.len(),
            });
        }
        let mut groups = [Vec::new(), Vec::new()];
        for (&v, &c) in values.iter().zip(classes) {
            groups[c as usize].push(v);
        }
        GroupStats::from_groups(&[&groups[0], &groups[1]])
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnovaTable {
    pub ssw: f64,
    pub ssb: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub f: f64,
}

impl AnovaTable {
    pub fn sst(&self) -> f64 {
        self.ssw + self.ssb
    }
}

pub fn anova(stats: &GroupStats) -> AnovaTable {
    let k = stats.group_count();
    let ssw: f64 = stats
        .groups
        .iter()
        .map(|g| (g.n - 1) as f64 * g.variance)
        .sum();
    let first = stats.groups[0].mean;
    let ssb = if stats.groups.iter().all(|g| g.mean == first) {
        0.0
    } else {
        stats
            .groups
            .iter()
            .map(|g| g.n as f64 * (g.mean - stats.grand_mean).powi(2))
            .sum()
    };
    let df_between = k - 1;
    let df_within = stats.total - k;
    let f = if ssb == 0.0 {
        0.0
    } else if ssw == 0.0 {
        f64::INFINITY
    } else {
        (ssb / df_between as f64) / (ssw / df_within as f64)
    };
    AnovaTable {
        ssw,
        ssb,
        df_between,
        df_within,
        f,
    }
}

/// F = (SSB/(K−1)) / (SSW/(N−K)). Returns `+∞` when the groups have no
/// within-group spread but different means, and 0 when all means coincide.
pub fn anova_f(stats: &GroupStats) -> f64 {
    anova(stats).f
}
