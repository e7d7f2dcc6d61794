//! Confusion matrices and the accuracy / precision / recall / F1 reports.
//! Attack (label 1) is the positive class.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::{predict, Prediction, TrainedModel};
use crate::error::{Error, Result};
use crate::tabular::Table;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionMatrix { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn from_classes(predicted: &[u8], truth: &[u8]) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: predicted.len(),
                right: truth.len(),
            });
        }
        let mut cm = ConfusionMatrix::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p, t) {
                (1, 1) => cm.tp += 1,
                (1, 0) => cm.fp += 1,
                (0, 1) => cm.fn_ += 1,
                (0, 0) => cm.tn += 1,
                (p, t) => {
                    return Err(Error::NonBinaryLabel(if p > 1 { p } else { t } as f64));
                }
            }
        }
        Ok(cm)
    }

    /// Same counts with benign treated as the positive class.
    pub fn swapped(&self) -> Self {
        ConfusionMatrix {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }

    pub fn metrics(&self) -> Result<Metrics> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyMatrix);
        }
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let accuracy = ratio(self.tp + self.tn, total);
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Ok(Metrics {
            accuracy,
            precision,
            recall,
            f1,
        })
    }
}

pub fn confusion(predictions: &[Prediction], truth: &[u8]) -> Result<ConfusionMatrix> {
    let classes: Vec<u8> = predictions.iter().map(|p| p.class).collect();
    ConfusionMatrix::from_classes(&classes, truth)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn tag(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub split: Split,
    pub attack: String,
    pub classifier: String,
    pub threshold: f64,
    pub n_features: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: ConfusionMatrix,
}

/// Labels for the grid cell a report belongs to.
#[derive(Clone, Debug)]
pub struct ReportContext<'a> {
    pub attack: &'a str,
    pub classifier: &'a str,
    pub threshold: f64,
}

fn report_on(
    model: &TrainedModel,
    t: &Table,
    split: Split,
    ctx: &ReportContext<'_>,
) -> Result<MetricsReport> {
    let preds = predict(model, t)?;
    let cm = confusion(&preds, &t.binary_labels()?)?;
    let m = cm.metrics()?;
    Ok(MetricsReport {
        split,
        attack: ctx.attack.to_string(),
        classifier: ctx.classifier.to_string(),
        threshold: ctx.threshold,
        n_features: model.features.len(),
        accuracy: m.accuracy,
        precision: m.precision,
        recall: m.recall,
        f1: m.f1,
        confusion: cm,
    })
}

/// One report for the training table and one for the test table.
pub fn evaluate(
    model: &TrainedModel,
    train: &Table,
    test: &Table,
    ctx: &ReportContext<'_>,
) -> Result<(MetricsReport, MetricsReport)> {
    Ok((
        report_on(model, train, Split::Train, ctx)?,
        report_on(model, test, Split::Test, ctx)?,
    ))
}

pub const METRICS_CSV_HEADER: &str =
    "attack,threshold,n_features,classifier,split,accuracy,precision,recall,f1";

/// CSV with metrics at five decimals, one line per report in the given order.
pub fn metrics_csv(reports: &[MetricsReport]) -> String {
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.5},{:.5},{:.5},{:.5}",
            r.attack,
            crate::config::format_threshold(r.threshold),
            r.n_features,
            r.classifier,
            r.split.tag(),
            r.accuracy,
            r.precision,
            r.recall,
            r.f1
        );
    }
    out
}

pub fn write_metrics(reports: &[MetricsReport], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let csv_path = dir.join("metrics.csv");
    std::fs::write(&csv_path, metrics_csv(reports)).map_err(|e| Error::io(&csv_path, e))?;
    crate::tabular::write_json(&reports, dir.join("metrics.json"))
}
