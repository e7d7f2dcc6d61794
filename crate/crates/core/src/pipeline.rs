//! Config-driven orchestration: preprocess, select, train and evaluate.
//!
//! Run directory layout:
//!
//! ```text
//! run-<utc timestamp>-<config hash>/
//!   preprocess/dataset-<attack>.csv, cleaning_report.json,
//!              category_mapping.json, datasets.json
//!   select/<attack>/feature_scores.csv, selection-<τ>.json, scoring.json
//!   train_eval/<attack>/split.json, train.csv, test.csv
//!   train_eval/<attack>/tau-<τ>/<classifier>.model.json
//!   metrics.csv, metrics.json
//!   manifest.json
//! ```
//!
//! Thresholds that select the same feature set share one set of models; the
//! directory is named after the smallest such threshold and every threshold
//! still gets its own metrics rows.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{train, Algorithm, TrainedModel};
use crate::config::{format_threshold, PipelineConfig};
use crate::discretizer::BinEdges;
use crate::error::{Error, Result};
use crate::eval::{evaluate, write_metrics, MetricsReport, ReportContext};
use crate::fselect::relief::default_sample_size;
use crate::fselect::{rank_features, select_by_threshold, ScoreMatrix, ThresholdSelection};
use crate::sampling::{split, ClassCounts, SplitManifest};
use crate::tabular::{
    drop_columns_by_name, drop_invalid_rows, drop_single_valued_columns, label_value, load_csv,
    load_csvs, minmax_normalize, split_by_attack, write_csv, write_json, CategoryMapping,
    CleaningReport, Table,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Per-attack datasets after cleaning and normalization, keyed by attack name.
#[derive(Clone, Debug)]
pub struct Preprocessed {
    pub tables: BTreeMap<String, Table>,
    pub report: CleaningReport,
    pub mapping: CategoryMapping,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub attack: String,
    pub label: String,
    pub rows: usize,
    pub features: usize,
    pub counts: ClassCounts,
}

fn mkdir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Fails if `path` exists: stage outputs are never overwritten in place.
fn fresh_dir(path: &Path) -> Result<()> {
    if path.exists() {
        return Err(Error::Config(format!(
            "{} already exists; outputs are never overwritten",
            path.display()
        )));
    }
    mkdir(path)
}

fn class_counts(t: &Table) -> Result<ClassCounts> {
    let labels = t.binary_labels()?;
    let attack = labels.iter().filter(|&&l| l == 1).count();
    Ok(ClassCounts {
        benign: labels.len() - attack,
        attack,
    })
}

/// Merges the inputs, cleans, normalizes and splits per attack. Writes
/// nothing.
pub fn preprocess(cfg: &PipelineConfig) -> Result<Preprocessed> {
    let loaded = load_csvs(&cfg.inputs, &cfg.label_column).map_err(|e| e.in_stage("load"))?;
    let mut report = loaded.report.clone();

    let (t, r) = drop_columns_by_name(&loaded.table, &cfg.exclude_columns)
        .map_err(|e| e.in_stage("drop columns"))?;
    report.merge(r);
    let (t, r) = drop_invalid_rows(&t);
    report.merge(r);
    let (t, r) = drop_single_valued_columns(&t);
    report.merge(r);
    let t = minmax_normalize(&t).map_err(|e| e.in_stage("normalize"))?;

    let labels = &t.label_column().values;
    let mut tables = BTreeMap::new();
    for attack in &cfg.attacks {
        let value = label_value(&t, &loaded.mapping, &attack.label)
            .filter(|v| labels.contains(v))
            .ok_or_else(|| Error::UnknownLabel(attack.label.clone()).in_stage("split"))?;
        let source = if cfg.benign_from_attack_files {
            let mut files = vec![false; loaded.rows_per_file.len()];
            for (r, &id) in t.row_ids().iter().enumerate() {
                if labels[r] == value {
                    files[loaded.file_of_row(id)] = true;
                }
            }
            let rows: Vec<usize> = (0..t.row_count())
                .filter(|&r| files[loaded.file_of_row(t.row_ids()[r])])
                .collect();
            t.select_rows(&rows)
        } else {
            t.clone()
        };
        let mut split = split_by_attack(
            &source,
            &loaded.mapping,
            &cfg.benign_label,
            std::slice::from_ref(&attack.label),
        )
        .map_err(|e| e.in_stage("split"))?;
        for w in split.warnings.drain(..) {
            report.warnings.push(format!("{}: {w}", attack.name));
        }
        let table = split
            .tables
            .remove(&attack.label)
            .expect("requested attack present");
        tables.insert(attack.name.clone(), table);
    }
    Ok(Preprocessed {
        tables,
        report,
        mapping: loaded.mapping,
    })
}

/// Runs [`preprocess`] and writes its outputs under `run_dir/preprocess`.
pub fn cmd_preprocess(cfg: &PipelineConfig, run_dir: &Path) -> Result<Preprocessed> {
    let pre = preprocess(cfg)?;
    let dir = run_dir.join("preprocess");
    fresh_dir(&dir)?;
    let mut summaries = Vec::new();
    for attack in &cfg.attacks {
        let t = &pre.tables[&attack.name];
        write_csv(t, dir.join(format!("dataset-{}.csv", attack.name)))?;
        summaries.push(DatasetSummary {
            attack: attack.name.clone(),
            label: attack.label.clone(),
            rows: t.row_count(),
            features: t.feature_count(),
            counts: class_counts(t)?,
        });
    }
    write_json(&pre.report, dir.join("cleaning_report.json"))?;
    write_json(&pre.mapping, dir.join("category_mapping.json"))?;
    write_json(&summaries, dir.join("datasets.json"))?;
    Ok(pre)
}

/// Reads the per-attack datasets written by [`cmd_preprocess`].
pub fn load_preprocessed(cfg: &PipelineConfig, run_dir: &Path) -> Result<BTreeMap<String, Table>> {
    cfg.attacks
        .iter()
        .map(|a| {
            let path = run_dir
                .join("preprocess")
                .join(format!("dataset-{}.csv", a.name));
            Ok((a.name.clone(), load_csv(&path, &cfg.label_column)?.table))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Selected {
    pub relief_m: usize,
    pub relief_seed: u64,
    pub bin_count: usize,
    pub bins: Vec<Option<BinEdges>>,
    pub scores: ScoreMatrix,
    pub selections: Vec<ThresholdSelection>,
}

/// Scores, ranks and thresholds one per-attack table. Depends only on the
/// table and the scoring part of the config.
pub fn select(cfg: &PipelineConfig, t: &Table) -> Result<Selected> {
    let n = t.row_count();
    let relief_m = cfg
        .relief_m
        .unwrap_or_else(|| default_sample_size(n))
        .min(n);
    let (scores, bins) = rank_features(t, cfg.bins, relief_m, cfg.relief_seed)?;
    let selections = cfg
        .thresholds
        .iter()
        .map(|&tau| select_by_threshold(&scores, tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(Selected {
        relief_m,
        relief_seed: cfg.relief_seed,
        bin_count: cfg.bins,
        bins,
        scores,
        selections,
    })
}

fn selection_file(tau: f64) -> String {
    format!("selection-{}.json", format_threshold(tau))
}

pub fn cmd_select(
    cfg: &PipelineConfig,
    tables: &BTreeMap<String, Table>,
    run_dir: &Path,
) -> Result<BTreeMap<String, Selected>> {
    let root = run_dir.join("select");
    fresh_dir(&root)?;
    let mut out = BTreeMap::new();
    for attack in &cfg.attacks {
        let t = tables
            .get(&attack.name)
            .ok_or_else(|| Error::Config(format!("no dataset for attack {:?}", attack.name)))?;
        let sel = select(cfg, t).map_err(|e| e.context(&attack.name))?;
        let dir = root.join(&attack.name);
        mkdir(&dir)?;
        sel.scores.write_csv(dir.join("feature_scores.csv"))?;
        for s in &sel.selections {
            write_json(s, dir.join(selection_file(s.threshold)))?;
        }
        write_json(&sel, dir.join("scoring.json"))?;
        out.insert(attack.name.clone(), sel);
    }
    Ok(out)
}

/// Reads the selections written by [`cmd_select`] for the configured grid.
pub fn load_selections(
    cfg: &PipelineConfig,
    run_dir: &Path,
) -> Result<BTreeMap<String, Vec<ThresholdSelection>>> {
    let mut out = BTreeMap::new();
    for a in &cfg.attacks {
        let dir = run_dir.join("select").join(&a.name);
        let mut v = Vec::new();
        for &tau in &cfg.thresholds {
            let path = dir.join(selection_file(tau));
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            v.push(serde_json::from_str(&text)?);
        }
        out.insert(a.name.clone(), v);
    }
    Ok(out)
}

/// A distinct selected feature set of one attack and the thresholds that
/// produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSetPlan {
    pub features: Vec<String>,
    pub thresholds: Vec<f64>,
}

/// Groups thresholds by identical feature set, in ascending threshold order.
/// Empty selections are left out.
pub fn plan_feature_sets(selections: &[ThresholdSelection]) -> Vec<FeatureSetPlan> {
    let mut plans: Vec<FeatureSetPlan> = Vec::new();
    let mut sorted: Vec<&ThresholdSelection> = selections.iter().collect();
    sorted.sort_by(|a, b| a.threshold.total_cmp(&b.threshold));
    for s in sorted.into_iter().filter(|s| !s.is_empty()) {
        let mut indexed: Vec<(usize, String)> = s
            .features
            .iter()
            .map(|f| (f.index, f.name.clone()))
            .collect();
        indexed.sort();
        let features: Vec<String> = indexed.into_iter().map(|(_, n)| n).collect();
        match plans.iter_mut().find(|p| p.features == features) {
            Some(p) => p.thresholds.push(s.threshold),
            None => plans.push(FeatureSetPlan {
                features,
                thresholds: vec![s.threshold],
            }),
        }
    }
    plans
}

#[derive(Clone, Debug, Default)]
pub struct TrainEvalOutput {
    pub reports: Vec<MetricsReport>,
    pub models_trained: usize,
    pub warnings: Vec<String>,
}

struct Cell<'a> {
    attack: &'a str,
    set: usize,
    algorithm: Algorithm,
}

/// Splits every attack table, trains each enabled classifier on each distinct
/// selected feature set and evaluates on both splits. Cells run in parallel;
/// report order is attack, threshold, classifier, split.
pub fn cmd_train_eval(
    cfg: &PipelineConfig,
    tables: &BTreeMap<String, Table>,
    selections: &BTreeMap<String, Vec<ThresholdSelection>>,
    run_dir: &Path,
) -> Result<TrainEvalOutput> {
    let root = run_dir.join("train_eval");
    fresh_dir(&root)?;
    let mut out = TrainEvalOutput::default();
    let mut splits = BTreeMap::new();
    let mut plans = BTreeMap::new();
    for attack in &cfg.attacks {
        let name = attack.name.as_str();
        let t = tables
            .get(name)
            .ok_or_else(|| Error::Config(format!("no dataset for attack {name:?}")))?;
        let sels = selections
            .get(name)
            .ok_or_else(|| Error::Config(format!("no selections for attack {name:?}")))?;
        let spec = cfg.sampling.spec(attack.resolved_scheme()?);
        let s = split(t, &spec).map_err(|e| e.context(name))?;
        let dir = root.join(name);
        mkdir(&dir)?;
        let manifest: SplitManifest = s.manifest(&spec);
        write_json(&manifest, dir.join("split.json"))?;
        if cfg.write_split_tables {
            write_csv(&s.train, dir.join("train.csv"))?;
            write_csv(&s.test, dir.join("test.csv"))?;
        }
        for sel in sels.iter().filter(|s| s.is_empty()) {
            out.warnings.push(format!(
                "{name}: threshold {} selects no features; skipped",
                format_threshold(sel.threshold)
            ));
        }
        let plan = plan_feature_sets(sels);
        for p in &plan {
            mkdir(&dir.join(format!("tau-{}", format_threshold(p.thresholds[0]))))?;
        }
        splits.insert(name, s);
        plans.insert(name, plan);
    }

    let mut cells = Vec::new();
    for attack in &cfg.attacks {
        for set in 0..plans[attack.name.as_str()].len() {
            for &algorithm in &cfg.classifiers.enabled {
                cells.push(Cell {
                    attack: &attack.name,
                    set,
                    algorithm,
                });
            }
        }
    }

    let trained: Vec<Result<Vec<MetricsReport>>> = cells
        .par_iter()
        .map(|cell| {
            let plan = &plans[cell.attack][cell.set];
            let s = &splits[cell.attack];
            let train_t = s.train.select_features(&plan.features)?;
            let test_t = s.test.select_features(&plan.features)?;
            let hp = cfg.classifiers.hyperparams(cell.algorithm);
            let model: TrainedModel = train(&train_t, &hp).map_err(|e| e.context(cell.attack))?;
            model.save(
                root.join(cell.attack)
                    .join(format!("tau-{}", format_threshold(plan.thresholds[0])))
                    .join(format!("{}.model.json", cell.algorithm.tag())),
            )?;
            let mut reports = Vec::with_capacity(2 * plan.thresholds.len());
            for &tau in &plan.thresholds {
                let ctx = ReportContext {
                    attack: cell.attack,
                    classifier: cell.algorithm.tag(),
                    threshold: tau,
                };
                let (a, b) = evaluate(&model, &train_t, &test_t, &ctx)?;
                reports.push(a);
                reports.push(b);
            }
            Ok(reports)
        })
        .collect();
    out.models_trained = cells.len();
    for r in trained {
        out.reports.extend(r?);
    }

    let attack_pos = |a: &str| cfg.attacks.iter().position(|x| x.name == a);
    let alg_pos = |c: &str| cfg.classifiers.enabled.iter().position(|x| x.tag() == c);
    out.reports.sort_by(|x, y| {
        attack_pos(&x.attack)
            .cmp(&attack_pos(&y.attack))
            .then(x.threshold.total_cmp(&y.threshold))
            .then(alg_pos(&x.classifier).cmp(&alg_pos(&y.classifier)))
            .then(x.split.cmp(&y.split))
    });
    write_metrics(&out.reports, run_dir)?;
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_hash: String,
    pub config: PipelineConfig,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub stages: Vec<StageTiming>,
    pub models_trained: usize,
    /// Every file under the run directory, relative, `/`-separated, sorted.
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    fn new(cfg: &PipelineConfig) -> Self {
        RunManifest {
            tool_version: TOOL_VERSION.to_string(),
            config_hash: cfg.hash(),
            config: cfg.clone(),
            status: RunStatus::Completed,
            error: None,
            stages: Vec::new(),
            models_trained: 0,
            files: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Records the directory inventory, including the manifest itself, and
    /// writes `name` into `run_dir`.
    fn finish(&mut self, run_dir: &Path, name: &str) -> Result<()> {
        let mut files = Vec::new();
        list_files(run_dir, run_dir, &mut files)?;
        files.push(name.to_string());
        files.sort();
        files.dedup();
        self.files = files;
        write_json(self, run_dir.join(name))
    }
}

fn list_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            list_files(root, &path, out)?;
        } else {
            let rel = path.strip_prefix(root).expect("under root");
            let parts: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            out.push(parts.join("/"));
        }
    }
    Ok(())
}

/// Creates `<output_dir>/run-<UTC timestamp>-<config hash>`, adding a numeric
/// suffix if that name is taken.
pub fn create_run_dir(cfg: &PipelineConfig) -> Result<PathBuf> {
    mkdir(&cfg.output_dir)?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = format!("run-{stamp}-{}", cfg.hash());
    for i in 1.. {
        let name = if i == 1 {
            base.clone()
        } else {
            format!("{base}-{i}")
        };
        let path = cfg.output_dir.join(name);
        match std::fs::create_dir(&path) {
            Ok(()) => return Ok(path),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::io(&path, e)),
        }
    }
    unreachable!()
}

/// Writes a per-stage manifest for the staged subcommands.
pub fn write_stage_manifest(
    cfg: &PipelineConfig,
    run_dir: &Path,
    stage: &str,
    millis: u128,
    models_trained: usize,
    warnings: Vec<String>,
) -> Result<()> {
    let mut m = RunManifest::new(cfg);
    m.stages.push(StageTiming {
        stage: stage.to_string(),
        millis,
    });
    m.models_trained = models_trained;
    m.warnings = warnings;
    m.finish(run_dir, &format!("manifest-{stage}.json"))
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub run_dir: PathBuf,
    pub manifest: RunManifest,
}

/// Validates, then runs every stage into a fresh run directory. The manifest
/// is written last, also when a stage fails.
pub fn cmd_run(cfg: &PipelineConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let run_dir = create_run_dir(cfg)?;
    let mut manifest = RunManifest::new(cfg);
    let result = run_stages(cfg, &run_dir, &mut manifest);
    if let Err(e) = &result {
        manifest.status = RunStatus::Failed;
        manifest.error = Some(e.to_string());
    }
    let written = manifest.finish(&run_dir, "manifest.json");
    result?;
    written?;
    Ok(RunOutput { run_dir, manifest })
}

fn run_stages(cfg: &PipelineConfig, run_dir: &Path, m: &mut RunManifest) -> Result<()> {
    let timed = |m: &mut RunManifest, stage: &'static str, start: Instant| {
        m.stages.push(StageTiming {
            stage: stage.to_string(),
            millis: start.elapsed().as_millis(),
        });
        log::info!("{stage} finished in {} ms", start.elapsed().as_millis());
    };

    let start = Instant::now();
    let pre = cmd_preprocess(cfg, run_dir).map_err(|e| e.in_stage("preprocess"))?;
    m.warnings.extend(pre.report.warnings.iter().cloned());
    timed(m, "preprocess", start);

    let start = Instant::now();
    let selected = cmd_select(cfg, &pre.tables, run_dir).map_err(|e| e.in_stage("select"))?;
    for (attack, s) in &selected {
        m.warnings
            .extend(s.scores.warnings.iter().map(|w| format!("{attack}: {w}")));
    }
    timed(m, "select", start);

    let start = Instant::now();
    let selections = selected
        .into_iter()
        .map(|(k, v)| (k, v.selections))
        .collect();
    let out = cmd_train_eval(cfg, &pre.tables, &selections, run_dir)
        .map_err(|e| e.in_stage("train_eval"))?;
    m.models_trained = out.models_trained;
    m.warnings.extend(out.warnings);
    timed(m, "train_eval", start);
    Ok(())
}
