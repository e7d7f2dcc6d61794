use serde::{Deserialize, Serialize};

use super::{require_both_classes, sigmoid, Dataset, Prediction};
use crate::error::{Error, Result};
use crate::eval::ConfusionMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Class 1 is predicted when h(Z) is strictly above this value.
    pub decision_threshold: f64,
    /// Replace `decision_threshold` by the value in {0.05, 0.10, …, 0.95}
    /// with the best training F1.
    pub tune_threshold: bool,
    pub seed: u64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            learning_rate: 1.0,
            epochs: 1000,
            decision_threshold: 0.5,
            tune_threshold: false,
            seed: 0,
        }
    }
}

impl LogisticParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Hyperparams(format!(
                "logistic learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.decision_threshold > 0.0 && self.decision_threshold < 1.0) {
            return Err(Error::Hyperparams(format!(
                "logistic decision_threshold must lie in (0,1), got {}",
                self.decision_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// Intercept first, then one coefficient per feature.
    pub coefficients: Vec<f64>,
    pub decision_threshold: f64,
}

impl LogisticModel {
    pub fn linear(&self, row: &[f64]) -> f64 {
        self.coefficients[0]
            + self.coefficients[1..]
                .iter()
                .zip(row)
                .map(|(a, x)| a * x)
                .sum::<f64>()
    }
}

/// Canonical row order so the floating-point sums do not depend on how the
/// training rows were ordered.
fn canonical_order(data: &Dataset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| {
        data.labels[a].cmp(&data.labels[b]).then_with(|| {
            data.rows[a]
                .iter()
                .zip(&data.rows[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    order
}

fn mean_log_loss(model: &LogisticModel, data: &Dataset, order: &[usize]) -> f64 {
    let total: f64 = order
        .iter()
        .map(|&i| {
            let z = model.linear(&data.rows[i]);
            // log(1 + e^z) − y·z, computed without overflow.
            let softplus = z.max(0.0) + (-z.abs()).exp().ln_1p();
            softplus - data.labels[i] as f64 * z
        })
        .sum();
    total / order.len().max(1) as f64
}

/// Full-batch gradient descent on the mean cross-entropy from all-zero
/// coefficients.
pub fn train_logistic(data: &Dataset, p: &LogisticParams) -> Result<LogisticModel> {
    p.validate()?;
    let width = data.width();
    let mut model = LogisticModel {
        coefficients: vec![0.0; width + 1],
        decision_threshold: p.decision_threshold,
    };
    if data.is_empty() {
        return Err(Error::training("logistic", "empty training set"));
    }
    require_both_classes("logistic", data)?;
    let order = canonical_order(data);
    let n = data.len() as f64;
    let mut grad = vec![0.0; width + 1];
    for epoch in 0..p.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for &i in &order {
            let row = &data.rows[i];
            let err = sigmoid(model.linear(row)) - data.labels[i] as f64;
            grad[0] += err;
            for (g, x) in grad[1..].iter_mut().zip(row) {
                *g += err * x;
            }
        }
        for (a, g) in model.coefficients.iter_mut().zip(&grad) {
            *a -= p.learning_rate * g / n;
        }
        if model.coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::training(
                "logistic",
                format!("coefficients diverged at epoch {epoch}; lower learning_rate"),
            ));
        }
    }
    let loss = mean_log_loss(&model, data, &order);
    if !loss.is_finite() {
        return Err(Error::training(
            "logistic",
            "non-finite training loss; lower learning_rate",
        ));
    }
    if p.tune_threshold {
        model.decision_threshold = tune_threshold(&model, data);
    }
    Ok(model)
}

fn tune_threshold(model: &LogisticModel, data: &Dataset) -> f64 {
    let scores: Vec<f64> = data.rows.iter().map(|r| sigmoid(model.linear(r))).collect();
    let mut best = (f64::NEG_INFINITY, model.decision_threshold);
    for step in 1..=19 {
        let threshold = step as f64 / 20.0;
        let predicted: Vec<u8> = scores.iter().map(|&h| (h > threshold) as u8).collect();
        let f1 = ConfusionMatrix::from_classes(&predicted, &data.labels)
            .ok()
            .and_then(|cm| cm.metrics().ok())
            .map_or(0.0, |m| m.f1);
        if f1 > best.0 {
            best = (f1, threshold);
        }
    }
    best.1
}

pub fn predict_logistic(m: &LogisticModel, row: &[f64]) -> Result<Prediction> {
    if row.len() + 1 != m.coefficients.len() {
        return Err(Error::WidthMismatch {
            expected: m.coefficients.len() - 1,
            found: row.len(),
        });
    }
    let h = sigmoid(m.linear(row));
    Ok(Prediction {
        class: (h > m.decision_threshold) as u8,
        score: h,
    })
}
