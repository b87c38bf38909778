use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orlicz::runner::{self, RunOptions};
use orlicz::{CliError, ExperimentConfig};

/// Generalized Orlicz norm and Gamma-convergence experiments.
#[derive(Parser)]
#[command(name = "orlicz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the hypothesis preflight only.
    Check(Common),
    /// Preflight, run the experiment and write reports.
    Run(Common),
    /// Re-render the JSON reports of an output directory as CSV.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Run even if the preflight fails, without evaluating assertions.
    #[arg(long)]
    report_only: bool,
    /// Output directory; overrides ORLICZ_OUT_DIR and the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    ExperimentConfig::load(path)
}

fn base_dir(common: &Common) -> PathBuf {
    common
        .config
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_default()
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check(common) => {
            let cfg = load(&common)?;
            let report = runner::check(&cfg, common.threads)?;
            for line in report.lines() {
                println!("{line}");
            }
            if !report.pass() {
                let names: Vec<&str> = report.failures().iter().map(|a| a.name.as_str()).collect();
                return Err(CliError::Preflight(names.join(", ")));
            }
            Ok(())
        }
        Command::Run(common) => {
            let cfg = load(&common)?;
            let opts = RunOptions {
                out: common.out.clone(),
                threads: common.threads,
                report_only: common.report_only,
            };
            let outcome = runner::run(&cfg, &base_dir(&common), &opts)?;
            print!("{}", outcome.summary);
            println!("reports written to {}", outcome.out_dir.display());
            match outcome.failures() {
                0 => Ok(()),
                k => Err(CliError::Assertion(k)),
            }
        }
        Command::Report(common) => {
            let cfg = common.config.as_ref().map(|_| load(&common)).transpose()?;
            let dir = runner::resolve_out_dir(common.out.as_deref(), cfg.as_ref());
            for path in runner::report(&dir)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
