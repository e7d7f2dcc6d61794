use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use flowsel::config::{parse_thresholds, Overrides, PipelineConfig};
use flowsel::pipeline::{
    cmd_preprocess, cmd_run, cmd_select, cmd_train_eval, create_run_dir, load_preprocessed,
    load_selections, write_stage_manifest,
};
use flowsel::{Error, Result};

/// Filter feature selection and classifier evaluation for network flow tables.
#[derive(Parser)]
#[command(name = "flowsel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean, normalize and split the inputs into per-attack datasets.
    Preprocess(Common),
    /// Score features and write one selection per threshold.
    Select(Staged),
    /// Split, train every classifier on every selection and report metrics.
    TrainEval(Staged),
    /// All stages into a fresh run directory.
    Run(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the sampling and classifier seeds.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; takes precedence over FLOWSEL_OUT_DIR and the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated attack names to keep.
    #[arg(long, value_delimiter = ',')]
    attacks: Option<Vec<String>>,
    /// Comma-separated threshold grid.
    #[arg(long)]
    thresholds: Option<String>,
}

#[derive(Args)]
struct Staged {
    #[command(flatten)]
    common: Common,
    /// Run directory created by an earlier stage.
    #[arg(long)]
    run: PathBuf,
}

fn load_config(c: &Common) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(&c.config)?;
    let thresholds = c.thresholds.as_deref().map(parse_thresholds).transpose()?;
    cfg.apply(&Overrides {
        seed: c.seed,
        out: c.out.clone(),
        attacks: c.attacks.clone(),
        thresholds,
    })?;
    Ok(cfg)
}

fn require_run_dir(p: &Path) -> Result<()> {
    if p.is_dir() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "run directory {} does not exist",
            p.display()
        )))
    }
}

fn execute(cli: Cli) -> Result<PathBuf> {
    match cli.command {
        Command::Run(c) => {
            let cfg = load_config(&c)?;
            let out = cmd_run(&cfg)?;
            for w in &out.manifest.warnings {
                log::warn!("{w}");
            }
            Ok(out.run_dir)
        }
        Command::Preprocess(c) => {
            let cfg = load_config(&c)?;
            let run_dir = create_run_dir(&cfg)?;
            let start = Instant::now();
            let pre = cmd_preprocess(&cfg, &run_dir)?;
            let ms = start.elapsed().as_millis();
            write_stage_manifest(&cfg, &run_dir, "preprocess", ms, 0, pre.report.warnings)?;
            Ok(run_dir)
        }
        Command::Select(s) => {
            let cfg = load_config(&s.common)?;
            require_run_dir(&s.run)?;
            let start = Instant::now();
            let tables = load_preprocessed(&cfg, &s.run)?;
            let selected = cmd_select(&cfg, &tables, &s.run)?;
            let warnings = selected
                .iter()
                .flat_map(|(a, sel)| sel.scores.warnings.iter().map(move |w| format!("{a}: {w}")))
                .collect();
            let ms = start.elapsed().as_millis();
            write_stage_manifest(&cfg, &s.run, "select", ms, 0, warnings)?;
            Ok(s.run)
        }
        Command::TrainEval(s) => {
            let cfg = load_config(&s.common)?;
            require_run_dir(&s.run)?;
            let start = Instant::now();
            let tables = load_preprocessed(&cfg, &s.run)?;
            let selections = load_selections(&cfg, &s.run)?;
            let out = cmd_train_eval(&cfg, &tables, &selections, &s.run)?;
            let ms = start.elapsed().as_millis();
            write_stage_manifest(
                &cfg,
                &s.run,
                "train_eval",
                ms,
                out.models_trained,
                out.warnings,
            )?;
            Ok(s.run)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
