use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mtc_cli::commands::{self, SweepParameter};
use mtc_cli::report::render_sweep;
use mtc_cli::scenario::parse_grid;
use mtc_cli::{selftest, CliError, Format, Overrides, RunReport, Scenario};
use mtc_core::protocol::{Backend, DEFAULT_ALPHA};

#[derive(Parser)]
#[command(
    name = "mtc",
    version,
    about = "Relative-phase extraction and entanglement discrimination for two-component states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per measurement run
    #[arg(long)]
    shots: Option<usize>,
    /// Significance level
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Sampler threads; results do not depend on this
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_parser = parse_backend)]
    backend: Option<Backend>,
    /// Suppress the human-readable summary on stderr
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the relative phase from three measurement runs
    ExtractPhase {
        #[command(flatten)]
        common: Common,
        /// Export each run's measurement record into this directory
        #[arg(long)]
        export_dir: Option<PathBuf>,
    },
    /// Decide between the entangled state and the classical mixture
    Discriminate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        export_dir: Option<PathBuf>,
    },
    /// Tabulate analytic and sampled even-parity probability over a grid
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated phases, e.g. "0,pi/2,pi"
        #[arg(long)]
        phi_grid: Option<String>,
        /// Comma-separated weights
        #[arg(long)]
        p_grid: Option<String>,
    },
    /// Run the oracle cross-checks and golden statistical checks
    Selftest {
        /// Perturb the closed-form parity probability by 1e-6
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Re-analyze an exported measurement record
    Replay {
        #[arg(long)]
        record: PathBuf,
        /// Reference pattern for the z-basis tally
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, short)]
        quiet: bool,
    },
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    match s {
        "dense" => Ok(Backend::Dense),
        "analytic" => Ok(Backend::Analytic),
        _ => Err(format!("unknown backend {s:?} (expected dense or analytic)")),
    }
}

fn load(common: &Common) -> Result<Scenario, CliError> {
    let mut scenario = Scenario::load(&common.config)?;
    scenario.apply(&Overrides {
        seed: common.seed,
        shots: common.shots,
        alpha: common.alpha,
        workers: common.workers,
        backend: common.backend,
    });
    Ok(scenario)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_report(report: &RunReport, format: Option<Format>, out: Option<&Path>, quiet: bool) -> Result<(), CliError> {
    emit(&report.render(format.unwrap_or_default())?, out)?;
    if !quiet {
        eprint!("{}", report.summary());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::ExtractPhase { common, export_dir } => {
            let report = commands::extract_phase(&load(&common)?, export_dir.as_deref())?;
            emit_report(&report, common.format, common.out.as_deref(), common.quiet)?;
            Ok(commands::report_exit_code(&report))
        }
        Command::Discriminate { common, export_dir } => {
            let report = commands::discriminate(&load(&common)?, export_dir.as_deref())?;
            emit_report(&report, common.format, common.out.as_deref(), common.quiet)?;
            Ok(commands::report_exit_code(&report))
        }
        Command::Sweep {
            common,
            phi_grid,
            p_grid,
        } => {
            let scenario = load(&common)?;
            let phi = phi_grid.as_deref().map(parse_grid).transpose()?;
            let p = p_grid.as_deref().map(parse_grid).transpose()?;
            let (param, grid) = commands::sweep_grid(&scenario, phi, p)?;
            let rows = commands::sweep(&scenario, param, &grid)?;
            emit(
                &render_sweep(&rows, common.format.unwrap_or(Format::Csv))?,
                common.out.as_deref(),
            )?;
            if !common.quiet {
                let name = if param == SweepParameter::Phi { "phi" } else { "p" };
                eprintln!("swept {name} over {} points", rows.len());
            }
            Ok(0)
        }
        Command::Selftest { inject_fault } => {
            let summary = selftest::run(if inject_fault { 1e-6 } else { 0.0 });
            print!("{}", summary.render());
            Ok(if summary.passed() { 0 } else { 1 })
        }
        Command::Replay {
            record,
            pattern,
            alpha,
            out,
            format,
            quiet,
        } => {
            let text = std::fs::read_to_string(&record)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", record.display())))?;
            let report = commands::replay(&text, pattern.as_deref(), alpha)?;
            emit_report(&report, format, out.as_deref(), quiet)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
