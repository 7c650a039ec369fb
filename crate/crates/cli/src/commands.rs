//! Subcommand implementations. Each returns a report; writing it out and
//! choosing the exit code is left to the binary.

use std::path::Path;
use std::time::Instant;

use mtc_core::measurement::{tally_parity, tally_pattern, MeasurementRecord};
use mtc_core::protocol::{analytic_p_even, run_discrimination, run_phase_extraction, Stage, Verdict};
use mtc_core::rng::derive_seed;
use mtc_core::{BasisString, Preparation, ProtocolConfig};

use crate::error::CliError;
use crate::report::{ReplaySummary, RunReport, Runs, Seeds, SweepRow};
use crate::scenario::{Scenario, StateKind};

fn seeds(config: &ProtocolConfig) -> Seeds {
    Seeds {
        z: config.stage_seed(Stage::ZBasis),
        hadamard: config.stage_seed(Stage::Hadamard),
        shifted: config.stage_seed(Stage::ShiftedHadamard),
        bootstrap: config.bootstrap_seed(),
    }
}

fn export_records(dir: &Path, records: &[MeasurementRecord]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for r in records {
        std::fs::write(dir.join(format!("{}.txt", r.source)), r.to_text())?;
    }
    Ok(())
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Relative-phase extraction. `OutsideFamily` surfaces as an error (exit 3).
pub fn extract_phase(scenario: &Scenario, export_dir: Option<&Path>) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let prep = scenario.validate()?;
    let config = scenario.protocol_config();
    let run = run_phase_extraction(&prep, &config)?;
    if let Some(dir) = export_dir {
        export_records(dir, &run.records)?;
    }
    let mut report = RunReport::new("extract-phase");
    report.scenario = Some(scenario.clone());
    report.seeds = Some(seeds(&config));
    report.runs = Runs {
        z: Some(run.z),
        hadamard: Some(run.hadamard),
        shifted: Some(run.shifted),
    };
    report.phase_estimate = Some(run.estimate);
    report.timing.elapsed_ms = elapsed_ms(start);
    Ok(report)
}

/// Entangled-versus-mixture discrimination. The report is produced for
/// every verdict; the caller maps `OutsideFamily` to exit 3.
pub fn discriminate(scenario: &Scenario, export_dir: Option<&Path>) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let prep = scenario.validate()?;
    let config = scenario.protocol_config();
    let run = run_discrimination(&prep, &config)?;
    if let Some(dir) = export_dir {
        export_records(dir, &run.records)?;
    }
    let mut report = RunReport::new("discriminate");
    report.scenario = Some(scenario.clone());
    report.seeds = Some(seeds(&config));
    report.runs = Runs {
        z: Some(run.z),
        hadamard: run.hadamard,
        shifted: run.shifted,
    };
    report.decision = Some(run.decision);
    report.timing.elapsed_ms = elapsed_ms(start);
    Ok(report)
}

/// Exit code a finished report implies.
pub fn report_exit_code(report: &RunReport) -> i32 {
    match report.decision {
        Some(d) if d.verdict == Verdict::OutsideFamily => 3,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Phi,
    P,
}

impl SweepParameter {
    fn name(&self) -> &'static str {
        match self {
            SweepParameter::Phi => "phi",
            SweepParameter::P => "p",
        }
    }
}

/// Resolve the sweep grid: flags win over the file's `[sweep]` table.
pub fn sweep_grid(
    scenario: &Scenario,
    phi_flag: Option<Vec<f64>>,
    p_flag: Option<Vec<f64>>,
) -> Result<(SweepParameter, Vec<f64>), CliError> {
    let resolve = |v: &Option<Vec<crate::scenario::GridValue>>| -> Result<Option<Vec<f64>>, CliError> {
        v.as_ref().map(|g| g.iter().map(|x| x.resolve()).collect()).transpose()
    };
    let (phi, p) = if phi_flag.is_some() || p_flag.is_some() {
        (phi_flag, p_flag)
    } else {
        let spec = scenario.sweep.clone().unwrap_or_default();
        (resolve(&spec.phi)?, resolve(&spec.p)?)
    };
    let (param, grid) = match (phi, p) {
        (Some(g), None) => (SweepParameter::Phi, g),
        (None, Some(g)) => (SweepParameter::P, g),
        (Some(_), Some(_)) => return Err(CliError::Config("give either a phi grid or a p grid, not both".into())),
        (None, None) => return Err(CliError::Config("no sweep grid given".into())),
    };
    if grid.is_empty() {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    Ok((param, grid))
}

/// Analytic and sampled `p_even` over a one-parameter grid.
pub fn sweep(scenario: &Scenario, param: SweepParameter, grid: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    scenario.validate()?;
    let kind = scenario.kind()?;
    if param == SweepParameter::Phi && kind == StateKind::Mixture {
        return Err(CliError::Config("a phi sweep needs a pure state".into()));
    }
    // validate every grid point before sampling anything
    let preps: Vec<(f64, Option<f64>, Preparation)> = grid
        .iter()
        .map(|&v| {
            let (p, phi) = match (param, kind) {
                (SweepParameter::Phi, _) => (scenario.state.p, Some(v)),
                (SweepParameter::P, StateKind::Pure) => (v, scenario.state.phi),
                (SweepParameter::P, StateKind::Mixture) => (v, None),
            };
            scenario.preparation_with(p, phi).map(|prep| (p, phi, prep))
        })
        .collect::<Result<_, _>>()?;
    let base = scenario.protocol_config();
    preps
        .into_iter()
        .enumerate()
        .map(|(i, (p, phi, prep))| {
            let config = ProtocolConfig {
                seed: derive_seed(base.seed, i as u64),
                ..base
            };
            let analytic = match phi {
                Some(phi) => analytic_p_even(p, phi)?,
                None => 0.5,
            };
            let record = config.measure(&prep, Stage::Hadamard)?;
            let stats = tally_parity(&record, config.alpha)?;
            Ok(SweepRow {
                parameter: param.name().to_string(),
                value: grid[i],
                p,
                phi: phi.map(mtc_core::states::normalize_angle),
                analytic_p_even: analytic,
                p_even_hat: stats.p_even_hat,
                ci_low: stats.ci_low,
                ci_high: stats.ci_high,
                even_count: stats.even_count,
                total: stats.total,
                seed: record.seed,
            })
        })
        .collect()
}

/// Re-analyze an exported measurement record.
pub fn replay(text: &str, pattern: Option<&str>, alpha: f64) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let record = MeasurementRecord::from_text(text).map_err(|e| CliError::Config(e.to_string()))?;
    let parity = tally_parity(&record, alpha).map_err(CliError::from_config)?;
    let pattern_statistics = match pattern {
        Some(p) => {
            let b: BasisString = p.parse().map_err(CliError::from_config)?;
            Some(tally_pattern(&record, b, alpha).map_err(CliError::from_config)?)
        }
        None => None,
    };
    let mut report = RunReport::new("replay");
    report.replay = Some(ReplaySummary {
        source: record.source.clone(),
        n: record.n,
        seed: record.seed,
        pattern: pattern.map(str::to_string),
        parity,
        pattern_statistics,
    });
    report.timing.elapsed_ms = elapsed_ms(start);
    Ok(report)
}
