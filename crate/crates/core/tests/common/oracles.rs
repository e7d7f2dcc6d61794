//! Brute-force references for the scorers, written straight from the
//! definitions with no shared code.
#![allow(dead_code)]

use flowsel::tabular::{Column, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn h(counts: &[f64]) -> f64 {
    let n: f64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| -(c / n) * (c / n).log2())
        .sum()
}

/// Mutual information straight from the joint distribution.
pub fn mi_oracle(a: &[Vec<u64>]) -> f64 {
    let n: f64 = a.iter().flatten().sum::<u64>() as f64;
    let rows: Vec<f64> = a.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols: Vec<f64> = (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let mut mi = 0.0;
    for (i, r) in a.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            if c > 0 {
                let p = c as f64 / n;
                mi += p * (p * n * n / (rows[i] * cols[j])).log2();
            }
        }
    }
    mi.max(0.0)
}

pub fn marginals(a: &[Vec<u64>]) -> (Vec<f64>, Vec<f64>) {
    let rows = a.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols = (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    (rows, cols)
}

/// χ² = N·(Σ A²/(R·B) − 1) over the non-empty rows and columns.
pub fn chi2_oracle(a: &[Vec<u64>]) -> f64 {
    let (rows, cols) = marginals(a);
    let n: f64 = rows.iter().sum();
    let mut s = 0.0;
    for (i, r) in a.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            if rows[i] > 0.0 && cols[j] > 0.0 {
                s += (c * c) as f64 / (rows[i] * cols[j]);
            }
        }
    }
    (n * (s - 1.0)).max(0.0)
}

/// Table whose features take values in {0, ¼, ½, ¾, 1}, each column pinned to
/// span [0,1], so equal-width bin codes are ⌊k·v⌋ clamped to k − 1.
pub fn quarter_table(n: usize, features: usize, seed: u64) -> Table {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Column> = (0..features)
        .map(|j| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0..5) as f64 / 4.0).collect();
            v[0] = 0.0;
            v[1] = 1.0;
            Column::numeric(format!("f{j}"), v)
        })
        .collect();
    let mut labels: Vec<f64> = (0..n).map(|_| rng.gen_range(0..2) as f64).collect();
    labels[2] = 0.0;
    labels[3] = 0.0;
    labels[4] = 1.0;
    labels[5] = 1.0;
    cols.push(Column::label("Label", labels));
    Table::new(cols).unwrap()
}

/// Exhaustive Relief over every row: nearest hit and miss by Manhattan
/// distance, first index on ties, 0/1 difference of the bin codes.
pub fn relief_oracle(t: &Table, k: usize) -> Vec<f64> {
    let rows = t.feature_rows();
    let y = t.binary_labels().unwrap();
    let code = |v: f64| ((v * k as f64).floor() as usize).min(k - 1);
    let n = rows.len();
    let mut w = vec![0.0; t.feature_count()];
    for i in 0..n {
        let dist = |j: usize| -> f64 {
            rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| (a - b).abs())
                .sum()
        };
        let nearest = |same: bool| {
            (0..n)
                .filter(|&j| j != i && (y[j] == y[i]) == same)
                .fold(None, |best: Option<(f64, usize)>, j| {
                    let d = dist(j);
                    match best {
                        Some((bd, _)) if bd <= d => best,
                        _ => Some((d, j)),
                    }
                })
                .unwrap()
                .1
        };
        let (hit, miss) = (nearest(true), nearest(false));
        for f in 0..w.len() {
            let c = |r: usize| code(rows[r][f]);
            let dm = (c(i) != c(miss)) as u8 as f64;
            let dh = (c(i) != c(hit)) as u8 as f64;
            w[f] += (dm - dh) / n as f64;
        }
    }
    w
}
