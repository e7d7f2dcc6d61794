//! Synthetic data shared by the integration tests.
#![allow(dead_code)]

pub mod oracles;

use std::io::Write as _;
use std::path::{Path, PathBuf};

use flowsel::tabular::{Column, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` rows, `features` columns in [0,1], about 30 % attack. Feature 0
/// separates the classes perfectly (attack above 0.5), feature 1 is shifted
/// by 0.35 for attack rows, everything else is uniform noise.
pub fn planted(n: usize, features: usize, seed: u64) -> Table {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<f64> = (0..n)
        .map(|_| (rng.gen::<f64>() < 0.3) as u8 as f64)
        .collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); features];
    for &y in &labels {
        for (j, col) in cols.iter_mut().enumerate() {
            let u: f64 = rng.gen();
            col.push(match j {
                0 => 0.5 * y + 0.49 * u,
                1 => 0.35 * y + 0.65 * u,
                _ => u,
            });
        }
    }
    // pin each column to exactly [0,1]
    for col in &mut cols {
        col[0] = 0.0;
        col[1] = 1.0;
    }
    let mut columns: Vec<Column> = cols
        .into_iter()
        .enumerate()
        .map(|(j, v)| Column::numeric(format!("f{j}"), v))
        .collect();
    let mut labels = labels;
    labels[0] = 0.0;
    labels[1] = 1.0;
    columns.push(Column::label("Label", labels));
    Table::new(columns).unwrap()
}

/// Two Gaussian-ish blobs in 2-D, linearly separable with a margin.
pub fn blobs(n: usize, seed: u64) -> Table {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut x, mut y, mut l) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        let c = (i % 2) as f64;
        let cx = 0.25 + 0.5 * c;
        let cy = 0.3 + 0.4 * c;
        x.push(cx + (rng.gen::<f64>() - 0.5) * 0.3);
        y.push(cy + (rng.gen::<f64>() - 0.5) * 0.3);
        l.push(c);
    }
    Table::new(vec![
        Column::numeric("x", x),
        Column::numeric("y", y),
        Column::label("Label", l),
    ])
    .unwrap()
}

/// Random table with `rows` rows and `features` features taking a few
/// distinct values, plus random binary labels with both classes present.
pub fn random_table(rows: usize, features: usize, levels: u32, seed: u64) -> Table {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Column> = (0..features)
        .map(|j| {
            let v = (0..rows)
                .map(|_| rng.gen_range(0..levels) as f64 / (levels - 1).max(1) as f64)
                .collect();
            Column::numeric(format!("f{j}"), v)
        })
        .collect();
    let mut labels: Vec<f64> = (0..rows).map(|_| rng.gen_range(0..2) as f64).collect();
    labels[0] = 0.0;
    labels[1] = 1.0;
    columns.push(Column::label("Label", labels));
    Table::new(columns).unwrap()
}

/// Writes raw flow-style CSV files for pipeline tests: one file per attack
/// label, each with benign rows, a timestamp, a constant column, a repeated
/// header and one row with an infinite value.
pub fn write_flow_csvs(dir: &Path, seed: u64) -> Vec<PathBuf> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let header =
        "Dst Port,Timestamp,Flow Duration,Tot Fwd Pkts,Flow Byts/s,Zero Col,Noise A,Noise B,Label";
    let mut paths = Vec::new();
    for (i, (label, attacks)) in [("FTP-BruteForce", 300), ("Brute Force -Web", 60)]
        .into_iter()
        .enumerate()
    {
        let path = dir.join(format!("day{i}.csv"));
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "{header}").unwrap();
        for r in 0..(700 + attacks) {
            let attack = r >= 700;
            let (a, b) = if attack {
                (0.6 + 0.4 * rng.gen::<f64>(), 0.55 + 0.45 * rng.gen::<f64>())
            } else {
                (0.55 * rng.gen::<f64>(), 0.5 * rng.gen::<f64>())
            };
            writeln!(
                f,
                "{},01/03/2018 08:{:02}:{:02},{:.3},{:.3},{:.4},0,{:.5},{:.5},{}",
                rng.gen_range(1..65535),
                r / 60 % 60,
                r % 60,
                a * 1e6,
                b * 40.0,
                rng.gen::<f64>() * 1e4,
                rng.gen::<f64>(),
                rng.gen::<f64>(),
                if attack { label } else { "Benign" }
            )
            .unwrap();
            if r == 10 {
                writeln!(f, "{header}").unwrap();
            }
        }
        writeln!(f, "80,01/03/2018 09:00:00,Infinity,1,1,0,0.5,0.5,Benign").unwrap();
        paths.push(path);
    }
    paths
}

/// Minimal pipeline config for the files from [`write_flow_csvs`].
pub fn flow_config(inputs: &[PathBuf], out: &Path) -> String {
    serde_json::json!({
        "inputs": inputs,
        "attacks": [
            {"name": "ftp", "label": "FTP-BruteForce"},
            {"name": "web", "label": "Brute Force -Web"}
        ],
        "output_dir": out,
        "classifiers": {"forest": {"tree_count": 5}}
    })
    .to_string()
}
