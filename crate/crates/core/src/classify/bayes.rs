use serde::{Deserialize, Serialize};

use super::{Dataset, Prediction};
use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BayesParams {
    /// Lower bound applied to every per-class standard deviation.
    pub variance_floor: f64,
    pub seed: u64,
}

impl Default for BayesParams {
    fn default() -> Self {
        BayesParams {
            variance_floor: 1e-6,
            seed: 0,
        }
    }
}

impl BayesParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.variance_floor > 0.0 && self.variance_floor.is_finite()) {
            return Err(Error::Hyperparams(format!(
                "naive bayes variance_floor must be positive, got {}",
                self.variance_floor
            )));
        }
        Ok(())
    }
}

/// Gaussian naive Bayes: class priors plus a mean and standard deviation per
/// feature and class. Index 0 is benign, 1 attack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BayesModel {
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub std_devs: [Vec<f64>; 2],
}

impl BayesModel {
    /// log P(c) + Σ log N(xᵢ; μ, σ) for both classes.
    pub fn log_joint(&self, row: &[f64]) -> [f64; 2] {
        [0, 1].map(|c| {
            let log_likelihood: f64 = row
                .iter()
                .zip(&self.means[c])
                .zip(&self.std_devs[c])
                .map(|((&x, &mu), &sigma)| {
                    let z = (x - mu) / sigma;
                    -sigma.ln() - LN_SQRT_2PI - 0.5 * z * z
                })
                .sum();
            self.priors[c].ln() + log_likelihood
        })
    }
}

pub fn train_naive_bayes(data: &Dataset, p: &BayesParams) -> Result<BayesModel> {
    p.validate()?;
    let counts = data.class_counts();
    if counts.iter().any(|&n| n < 2) {
        return Err(Error::training(
            "naive_bayes",
            format!(
                "each class needs at least two rows (benign {}, attack {})",
                counts[0], counts[1]
            ),
        ));
    }
    let width = data.width();
    let n = data.len() as f64;
    let mut means = [vec![0.0; width], vec![0.0; width]];
    let mut std_devs = [vec![0.0; width], vec![0.0; width]];
    for c in 0..2 {
        let rows: Vec<&Vec<f64>> = data
            .rows
            .iter()
            .zip(&data.labels)
            .filter(|(_, &l)| l as usize == c)
            .map(|(r, _)| r)
            .collect();
        let nc = rows.len() as f64;
        for j in 0..width {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / nc;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (nc - 1.0);
            means[c][j] = mean;
            std_devs[c][j] = var.sqrt().max(p.variance_floor);
        }
    }
    Ok(BayesModel {
        priors: [counts[0] as f64 / n, counts[1] as f64 / n],
        means,
        std_devs,
    })
}

/// Arg-max of the log posterior; ties go to class 0. The score is the
/// normalized attack posterior.
pub fn predict_naive_bayes(m: &BayesModel, row: &[f64]) -> Result<Prediction> {
    if row.len() != m.means[0].len() {
        return Err(Error::WidthMismatch {
            expected: m.means[0].len(),
            found: row.len(),
        });
    }
    let [l0, l1] = m.log_joint(row);
    let score = if l0 == l1 {
        0.5
    } else {
        super::sigmoid(l1 - l0)
    };
    Ok(Prediction {
        class: (l1 > l0) as u8,
        score,
    })
}
