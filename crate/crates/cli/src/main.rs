use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use throughflow::config::RunConfig;
use throughflow::scenario::list_scenarios;
use throughflow::{par, run, Error};

/// Vorticity/stream-function through-flow simulator with a priori estimate checks.
///
/// The worker count of parallel loops and sweeps is read from THROUGHFLOW_WORKERS
/// (1 runs everything on the calling thread).
#[derive(Parser)]
#[command(name = "throughflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and its enabled checks.
    Run {
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the sweep lists of the configuration, one subdirectory per run.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the scenario registry.
    Scenarios,
    /// Parse and validate a configuration, printing it with defaults filled in.
    CheckConfig { config: PathBuf },
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn configure_workers() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("THROUGHFLOW_WORKERS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .with_context(|| format!("THROUGHFLOW_WORKERS must be a positive integer, got '{value}'"))?;
    anyhow::ensure!(n > 0, "THROUGHFLOW_WORKERS must be positive");
    if n == 1 {
        par::set_parallel(false);
    } else {
        // read by rayon when its global pool starts
        std::env::set_var("RAYON_NUM_THREADS", n.to_string());
    }
    Ok(())
}

fn load(path: &std::path::Path) -> anyhow::Result<RunConfig> {
    RunConfig::from_path(path).with_context(|| format!("reading {}", path.display()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Parse(_)
            | Error::Validation(_)
            | Error::UnknownScenario(_)
            | Error::Table(_)
            | Error::IncompatibleFlux { .. }
            | Error::BadTheta { .. }
            | Error::BadDelta { .. }
            | Error::InvalidGeometry(_)
            | Error::Io(_),
        ) => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

fn execute(cli: Cli) -> anyhow::Result<u8> {
    configure_workers()?;
    match cli.command {
        Command::Scenarios => {
            for s in list_scenarios() {
                println!("{:<22} {}", s.name, s.description);
            }
            Ok(0)
        }
        Command::CheckConfig { config } => {
            let cfg = load(&config)?;
            print!("{}", cfg.to_toml());
            Ok(0)
        }
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            let summary = run::run(&cfg, &dir)?;
            for e in &summary.report.entries {
                println!(
                    "{:<20} lhs={:<14.6e} rhs={:<14.6e} {}",
                    e.check_name,
                    e.lhs,
                    e.rhs,
                    if e.pass { "pass" } else { "FAIL" }
                );
            }
            match summary.first_failure() {
                Some(name) => {
                    eprintln!("check failed: {name}");
                    Ok(EXIT_CHECK_FAILED)
                }
                None => Ok(0),
            }
        }
        Command::Sweep { config, out } => {
            let cfg = load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            let summary = run::sweep(&cfg, &dir)?;
            for r in &summary.rows {
                println!(
                    "grid={} theta={} nu={} {} failed_checks={}",
                    r.grid, r.theta, r.nu, r.status, r.failed_checks
                );
            }
            match summary.first_failure() {
                Some(name) => {
                    eprintln!("check failed: {name}");
                    Ok(EXIT_CHECK_FAILED)
                }
                None => Ok(0),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
