mod common;

use std::path::Path;
use std::process::Command;

use flowsel::config::PipelineConfig;
use flowsel::fselect::{SelectedFeature, ThresholdSelection};
use flowsel::pipeline::{cmd_run, plan_feature_sets, RunManifest, RunStatus};

fn config(dir: &Path) -> PipelineConfig {
    let inputs = common::write_flow_csvs(dir, 5);
    let text = common::flow_config(&inputs, &dir.join("out"));
    let cfg = PipelineConfig::from_json(&text).unwrap();
    cfg.validate().unwrap();
    cfg
}

fn read(p: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

#[test]
fn repeat_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let a = cmd_run(&cfg).unwrap();
    let b = cmd_run(&cfg).unwrap();
    assert_ne!(a.run_dir, b.run_dir);
    for rel in [
        "metrics.csv",
        "metrics.json",
        "select/ftp/feature_scores.csv",
        "select/web/feature_scores.csv",
        "preprocess/dataset-ftp.csv",
        "train_eval/web/split.json",
    ] {
        assert_eq!(
            read(a.run_dir.join(rel)),
            read(b.run_dir.join(rel)),
            "{rel}"
        );
    }
    for f in &a.manifest.files {
        if f.ends_with(".model.json") {
            assert_eq!(read(a.run_dir.join(f)), read(b.run_dir.join(f)), "{f}");
        }
    }
}

#[test]
fn manifest_lists_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_run(&config(dir.path())).unwrap();
    let mut on_disk = Vec::new();
    for entry in walk(&out.run_dir) {
        let rel = entry.strip_prefix(&out.run_dir).unwrap();
        on_disk.push(rel.to_string_lossy().replace('\\', "/"));
    }
    on_disk.sort();
    assert_eq!(on_disk, out.manifest.files);
    for expected in [
        "manifest.json",
        "metrics.csv",
        "metrics.json",
        "preprocess/cleaning_report.json",
        "preprocess/category_mapping.json",
        "preprocess/dataset-ftp.csv",
        "preprocess/dataset-web.csv",
        "select/ftp/feature_scores.csv",
        "select/ftp/selection-0.35.json",
        "select/web/selection-0.55.json",
        "train_eval/ftp/split.json",
    ] {
        assert!(on_disk.iter().any(|f| f == expected), "missing {expected}");
    }
    let m: RunManifest = serde_json::from_slice(&read(out.run_dir.join("manifest.json"))).unwrap();
    assert!(matches!(m.status, RunStatus::Completed));
    assert_eq!(m.stages.len(), 3);
    assert_eq!(m.models_trained, out.manifest.models_trained);
    let metrics = String::from_utf8(read(out.run_dir.join("metrics.csv"))).unwrap();
    // one train and one test row per (attack, threshold, classifier)
    assert_eq!(metrics.lines().count(), 1 + 2 * 5 * 5 * 2);
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn cleaning_and_split_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_run(&config(dir.path())).unwrap();
    let report: serde_json::Value =
        serde_json::from_slice(&read(out.run_dir.join("preprocess/cleaning_report.json"))).unwrap();
    assert_eq!(report["dropped_row_counts"]["non-finite"], 2);
    assert_eq!(report["dropped_row_counts"]["repeated-header"], 2);
    let dropped: Vec<&str> = report["dropped_columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(dropped, ["Timestamp", "Zero Col"]);
    let split: serde_json::Value =
        serde_json::from_slice(&read(out.run_dir.join("train_eval/web/split.json"))).unwrap();
    // 700 benign and 60 attack rows in the web file only
    assert_eq!(split["train_counts"]["attack"], 42);
    assert_eq!(split["test_counts"]["attack"], 18);
    assert_eq!(split["train_counts"]["benign"], 140);
    assert_eq!(split["test_counts"]["benign"], 70);
}

#[test]
fn scoring_ignores_sampling_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let mut other = cfg.clone();
    other.sampling.seed = 999;
    other.classifiers.seed = 999;
    let a = cmd_run(&cfg).unwrap();
    let b = cmd_run(&other).unwrap();
    for rel in ["select/ftp/feature_scores.csv", "select/web/scoring.json"] {
        assert_eq!(
            read(a.run_dir.join(rel)),
            read(b.run_dir.join(rel)),
            "{rel}"
        );
    }
    assert_ne!(
        read(a.run_dir.join("train_eval/ftp/split.json")),
        read(b.run_dir.join("train_eval/ftp/split.json"))
    );
}

#[test]
fn empty_grid_fails_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.thresholds.clear();
    let err = cmd_run(&cfg).unwrap_err();
    assert!(err.is_validation());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_attack_label_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.attacks[1].label = "DDoS-HOIC".into();
    let err = cmd_run(&cfg).unwrap_err();
    assert!(err.to_string().contains("DDoS-HOIC"), "{err}");
    // the failed run still leaves a manifest
    let runs: Vec<_> = std::fs::read_dir(dir.path().join("out")).unwrap().collect();
    assert_eq!(runs.len(), 1);
    let run = runs.into_iter().next().unwrap().unwrap().path();
    let m: RunManifest = serde_json::from_slice(&read(run.join("manifest.json"))).unwrap();
    assert!(matches!(m.status, RunStatus::Failed));
    assert!(m.error.unwrap().contains("DDoS-HOIC"));
}

#[test]
fn empty_selection_is_skipped_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.thresholds = vec![0.5, 0.999_999];
    let out = cmd_run(&cfg).unwrap();
    assert!(out
        .manifest
        .warnings
        .iter()
        .any(|w| w.contains("0.999999") && w.contains("skipped")));
    let metrics = String::from_utf8(read(out.run_dir.join("metrics.csv"))).unwrap();
    assert!(!metrics.contains("0.999999"));
}

#[test]
fn forest_on_synthetic_flows_is_accurate() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_run(&config(dir.path())).unwrap();
    let metrics = String::from_utf8(read(out.run_dir.join("metrics.csv"))).unwrap();
    for line in metrics.lines().filter(|l| l.contains(",forest,test,")) {
        let acc: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!(acc >= 0.95, "{line}");
    }
}

/// Feature lists per attack and threshold (0.35 … 0.55) of a published
/// five-attack study; deduplicating equal sets gives 21 distinct subsets.
#[test]
fn identical_selections_share_models() {
    let grid = [0.35, 0.40, 0.45, 0.50, 0.55];
    let lists: [[&[usize]; 5]; 5] = [
        [
            &[2, 17, 19, 35, 0, 44, 56, 59],
            &[44, 56, 59],
            &[56, 59],
            &[56, 59],
            &[56, 59],
        ],
        [
            &[0, 2, 17, 19, 57, 56, 59],
            &[56, 59],
            &[56, 59],
            &[59],
            &[59],
        ],
        [
            &[
                16, 20, 10, 49, 66, 67, 35, 38, 56, 64, 34, 27, 7, 9, 11, 14, 15, 50, 25, 60, 62,
                2, 17, 19, 37, 63, 6, 33, 55, 18, 58, 4, 5, 53, 54, 3, 21, 22, 23, 24, 52, 32, 65,
                57,
            ],
            &[
                34, 27, 7, 9, 11, 14, 15, 50, 25, 60, 62, 2, 17, 19, 37, 63, 6, 33, 55, 18, 58, 4,
                5, 53, 54, 3, 21, 22, 23, 24, 52, 32, 65, 57,
            ],
            &[
                2, 17, 19, 37, 63, 6, 33, 55, 18, 58, 4, 5, 53, 54, 3, 21, 22, 23, 24, 52, 32, 65,
                57,
            ],
            &[3, 21, 22, 23, 24, 52, 32, 65, 57],
            &[57],
        ],
        [
            &[
                25, 27, 16, 40, 2, 5, 17, 19, 34, 53, 6, 18, 55, 21, 22, 23, 24, 51, 13, 39, 57,
                37, 56, 33, 32, 3, 11, 52, 4, 54, 58,
            ],
            &[
                2, 5, 17, 19, 34, 53, 6, 18, 55, 21, 22, 23, 24, 51, 13, 39, 57, 37, 56, 33, 32, 3,
                11, 52, 4, 54, 58,
            ],
            &[37, 56, 33, 32, 3, 11, 52, 4, 54, 58],
            &[3, 11, 52, 4, 54, 58],
            &[58],
        ],
        [
            &[
                39, 43, 47, 10, 15, 5, 26, 53, 56, 25, 2, 17, 19, 35, 16, 18, 27, 28, 34, 6, 23,
                30, 55, 29, 21, 22, 24, 57, 37, 11, 14,
            ],
            &[
                5, 26, 53, 56, 25, 2, 17, 19, 35, 16, 18, 27, 28, 34, 6, 23, 30, 55, 29, 21, 22,
                24, 57, 37, 11, 14,
            ],
            &[6, 23, 30, 55, 29, 21, 22, 24, 57, 37, 11, 14],
            &[57, 37, 11, 14],
            &[11, 14],
        ],
    ];
    let mut distinct = 0;
    for per_attack in lists {
        let sels: Vec<ThresholdSelection> = grid
            .iter()
            .zip(per_attack)
            .map(|(&threshold, idx)| ThresholdSelection {
                threshold,
                features: idx
                    .iter()
                    .map(|&i| SelectedFeature {
                        index: i,
                        name: format!("f{i:02}"),
                        mean_score: threshold,
                    })
                    .collect(),
            })
            .collect();
        let plan = plan_feature_sets(&sels);
        assert_eq!(plan.iter().map(|p| p.thresholds.len()).sum::<usize>(), 5);
        distinct += plan.len();
    }
    assert_eq!(distinct, 21);
    assert_eq!(distinct * 5, 105);
}

fn flowsel() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_flowsel"));
    c.env_remove("FLOWSEL_OUT_DIR").env("RUST_LOG", "warn");
    c
}

#[test]
fn cli_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = common::write_flow_csvs(dir.path(), 5);
    let cfg_path = dir.path().join("config.json");
    std::fs::write(
        &cfg_path,
        common::flow_config(&inputs, &dir.path().join("out")),
    )
    .unwrap();
    let cfg = cfg_path.to_str().unwrap();

    let bad = flowsel()
        .args(["run", "--config", cfg, "--thresholds", "0.5,0.4"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let bad = flowsel()
        .args(["run", "--config", cfg, "--attacks", "dns"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let bad = flowsel().args(["run", "--frobnicate"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let missing = flowsel()
        .args(["run", "--config", "/definitely/not/here.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));

    // staged run honours the env override and matches a one-shot run
    let env_out = dir.path().join("env-out");
    let pre = flowsel()
        .env("FLOWSEL_OUT_DIR", &env_out)
        .args([
            "preprocess",
            "--config",
            cfg,
            "--attacks",
            "ftp",
            "--seed",
            "7",
        ])
        .output()
        .unwrap();
    assert_eq!(
        pre.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&pre.stderr)
    );
    let run_dir = String::from_utf8(pre.stdout).unwrap().trim().to_string();
    assert!(Path::new(&run_dir).starts_with(&env_out));
    for stage in ["select", "train-eval"] {
        let o = flowsel()
            .args([
                stage,
                "--config",
                cfg,
                "--attacks",
                "ftp",
                "--seed",
                "7",
                "--run",
                &run_dir,
            ])
            .output()
            .unwrap();
        assert_eq!(
            o.status.code(),
            Some(0),
            "{stage}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let again = flowsel()
        .args([
            "select",
            "--config",
            cfg,
            "--attacks",
            "ftp",
            "--run",
            &run_dir,
        ])
        .output()
        .unwrap();
    assert_eq!(
        again.status.code(),
        Some(1),
        "select output must not be overwritten"
    );

    let one = flowsel()
        .args([
            "run",
            "--config",
            cfg,
            "--attacks",
            "ftp",
            "--seed",
            "7",
            "--out",
        ])
        .arg(dir.path().join("cli-out"))
        .output()
        .unwrap();
    assert_eq!(
        one.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    let one_dir = String::from_utf8(one.stdout).unwrap().trim().to_string();
    for rel in ["metrics.csv", "select/ftp/feature_scores.csv"] {
        assert_eq!(
            read(Path::new(&run_dir).join(rel)),
            read(Path::new(&one_dir).join(rel)),
            "{rel}"
        );
    }
}
