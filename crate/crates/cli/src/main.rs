use clap::{Args, Parser, Subcommand};
use onebit_amp_cli::config::{ExperimentConfig, ExperimentKind};
use onebit_amp_cli::runner::{run, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Seeded Monte Carlo experiments for one-bit amplitude estimation with
/// unlabeled quantizers. Each subcommand reads a JSON config and writes one
/// CSV table; a fixed seed reproduces the file byte for byte.
#[derive(Parser)]
#[command(name = "onebit-amp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimator mean-squared-error sweep over batch sizes.
    Mse(RunArgs),
    /// Detector threshold calibration and power sweep.
    Detect(RunArgs),
    /// Permutation-recovery probability sweep.
    Recovery(RunArgs),
    /// Gap-statistic power-law fit over quantizer counts.
    Gapfit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Swap in the full-scale grids declared under "full" in the config.
    #[arg(long)]
    full: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (expected, args) = match &cli.command {
        Command::Mse(a) => (ExperimentKind::Mse, a),
        Command::Detect(a) => (ExperimentKind::Detection, a),
        Command::Recovery(a) => (ExperimentKind::Recovery, a),
        Command::Gapfit(a) => (ExperimentKind::Gapfit, a),
    };
    match execute(expected, args) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(RunError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn execute(expected: ExperimentKind, args: &RunArgs) -> Result<String, RunError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text).map_err(RunError::Config)?;
    if cfg.experiment != expected {
        return Err(RunError::Config(format!(
            "config declares experiment \"{}\" but the \"{}\" run was requested",
            cfg.experiment.name(),
            expected.name()
        )));
    }
    cfg.apply_overrides(
        args.seed,
        args.out.as_ref().map(|p| p.display().to_string()),
        args.trials,
        args.full,
    );
    let out_path = cfg
        .out
        .clone()
        .ok_or_else(|| RunError::Config("no output path: set \"out\" or pass --out".into()))?;

    let result = run(&cfg)?;
    std::fs::write(&out_path, &result.csv)
        .map_err(|e| RunError::Numeric(format!("cannot write {out_path}: {e}")))?;

    let mut summary = format!(
        "{}: {} rows ({} trials, seed {}) -> {}",
        cfg.experiment.name(),
        result.rows,
        cfg.trials,
        cfg.seed,
        out_path
    );
    if let Some((alpha, c)) = result.fit {
        summary.push_str(&format!("; fit alpha = {alpha:.4}, c = {c:.4}"));
    }
    Ok(summary)
}
