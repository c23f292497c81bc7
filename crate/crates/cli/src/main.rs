use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swlme::config::{parse_entries, parse_override, RunConfig, KEYS};
use swlme::harness::{cmd_benchmark, cmd_convergence, cmd_run, cmd_wellbalance, Report};
use swlme::Error;

/// Shallow water moment solver with explicit and semi-implicit schemes.
///
/// Any configuration key can be overridden as `--key=value`, for example
/// `swlme run --test=6 --order=2 --mode=implicit --cfl=2`.
#[derive(Parser, Debug)]
#[command(name = "swlme", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and write CSV snapshots.
    Run(Common),
    /// Check that a steady test stays at rest for all four scheme variants.
    Wellbalance(Common),
    /// Error and observed-order table on 25..200 cells.
    Convergence(Common),
    /// Wall time of explicit versus implicit runs.
    Benchmark(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for CSV output; defaults to the configured output_path.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn is_override(arg: &str) -> bool {
    arg.strip_prefix("--")
        .and_then(|rest| rest.split_once('='))
        .is_some_and(|(key, _)| KEYS.contains(&key))
}

fn load(common: &Common, overrides: &[String]) -> swlme::Result<(RunConfig, PathBuf)> {
    let mut entries = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            parse_entries(&text)?
        }
        None => Vec::new(),
    };
    for arg in overrides {
        entries.push(parse_override(arg)?);
    }
    let cfg = RunConfig::from_entries(&entries)?;
    let dir = common.output_dir.clone().unwrap_or_else(|| cfg.output_path.clone());
    Ok((cfg, dir))
}

fn execute(command: &Command, overrides: &[String]) -> swlme::Result<Report> {
    let common = match command {
        Command::Run(c) | Command::Wellbalance(c) | Command::Convergence(c) | Command::Benchmark(c) => c,
    };
    let (cfg, dir) = load(common, overrides)?;
    let report = dispatch(command, &cfg, &dir)?;
    report.write_csv(&dir)?;
    Ok(report)
}

fn dispatch(command: &Command, cfg: &RunConfig, dir: &Path) -> swlme::Result<Report> {
    match command {
        Command::Run(_) => cmd_run(cfg, dir).map(|(_, report)| report),
        Command::Wellbalance(_) => cmd_wellbalance(cfg),
        Command::Convergence(_) => cmd_convergence(cfg),
        Command::Benchmark(_) => cmd_benchmark(cfg),
    }
}

fn main() -> ExitCode {
    let (overrides, args): (Vec<String>, Vec<String>) = std::env::args().partition(|a| is_override(a));
    let cli = Cli::parse_from(args);
    match execute(&cli.command, &overrides) {
        Ok(report) => {
            print!("{}", report.render());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("swlme: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("swlme: {e}");
            ExitCode::from(1)
        }
    }
}
