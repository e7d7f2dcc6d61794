use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{require_both_classes, sigmoid, Dataset, Prediction};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    /// Misclassification penalty. The objective is
    /// `½λ‖w‖² + mean hinge loss` with `λ = 1 / (C·n)`.
    pub c: f64,
    pub epochs: usize,
    /// Initial step; step t is `eta0 / (1 + eta0·λ·t)`.
    pub eta0: f64,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            epochs: 50,
            eta0: 0.1,
            seed: 0,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Hyperparams(format!(
                "svm c must be positive, got {}",
                self.c
            )));
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(Error::Hyperparams(format!(
                "svm eta0 must be positive, got {}",
                self.eta0
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Hyperparams("svm epochs must be positive".into()));
        }
        Ok(())
    }
}

/// Linear decision function `w·x + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl SvmModel {
    pub fn margin(&self, row: &[f64]) -> f64 {
        self.bias
            + self
                .weights
                .iter()
                .zip(row)
                .map(|(w, x)| w * x)
                .sum::<f64>()
    }
}

/// Seeded stochastic subgradient descent on the L2-regularized hinge loss.
/// The bias is not regularized.
pub fn train_svm(data: &Dataset, p: &SvmParams) -> Result<SvmModel> {
    p.validate()?;
    require_both_classes("svm", data)?;
    let n = data.len();
    let lambda = 1.0 / (p.c * n as f64);
    let mut model = SvmModel {
        weights: vec![0.0; data.width()],
        bias: 0.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0u64;
    for epoch in 0..p.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = p.eta0 / (1.0 + p.eta0 * lambda * t as f64);
            t += 1;
            let y = if data.labels[i] == 1 { 1.0 } else { -1.0 };
            let row = &data.rows[i];
            let violated = y * model.margin(row) < 1.0;
            let shrink = 1.0 - eta * lambda;
            for (w, x) in model.weights.iter_mut().zip(row) {
                *w *= shrink;
                if violated {
                    *w += eta * y * x;
                }
            }
            if violated {
                model.bias += eta * y;
            }
        }
        if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
            return Err(Error::training(
                "svm",
                format!("weights diverged at epoch {epoch}"),
            ));
        }
    }
    Ok(model)
}

/// Class 1 iff the margin is strictly positive; the score is the margin passed
/// through the logistic function.
pub fn predict_svm(m: &SvmModel, row: &[f64]) -> Result<Prediction> {
    if row.len() != m.weights.len() {
        return Err(Error::WidthMismatch {
            expected: m.weights.len(),
            found: row.len(),
        });
    }
    let margin = m.margin(row);
    Ok(Prediction {
        class: (margin > 0.0) as u8,
        score: sigmoid(margin),
    })
}
