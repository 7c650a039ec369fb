//! Machine-readable run reports and their human summaries.

use std::fmt::Write as _;

use mtc_core::bootstrap::CircularInterval;
use mtc_core::measurement::{ParityStatistics, PatternStatistics};
use mtc_core::protocol::{Decision, PhaseEstimate};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::scenario::Scenario;

pub const TOOL: &str = "mtc";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Structured,
    Csv,
}

/// Seeds owned by each run, derived from the scenario seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub z: u64,
    pub hadamard: u64,
    pub shifted: u64,
    pub bootstrap: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Runs {
    pub z: Option<PatternStatistics>,
    pub hadamard: Option<ParityStatistics>,
    pub shifted: Option<ParityStatistics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplaySummary {
    pub source: String,
    pub n: usize,
    pub seed: u64,
    pub pattern: Option<String>,
    pub parity: ParityStatistics,
    pub pattern_statistics: Option<PatternStatistics>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub scenario: Option<Scenario>,
    pub seeds: Option<Seeds>,
    pub runs: Runs,
    pub phase_estimate: Option<PhaseEstimate>,
    pub decision: Option<Decision>,
    pub replay: Option<ReplaySummary>,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            scenario: None,
            seeds: None,
            runs: Runs::default(),
            phase_estimate: None,
            decision: None,
            replay: None,
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        let value = serde_json::to_value(self).map_err(|e| CliError::Failure(e.to_string()))?;
        match format {
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&value).map_err(|e| CliError::Failure(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut rows = Vec::new();
                flatten("", &value, &mut rows);
                let mut out = String::from("key,value\n");
                for (k, v) in rows {
                    let _ = writeln!(out, "{k},{}", csv_field(&v));
                }
                Ok(out)
            }
        }
    }

    /// Aligned plain-text summary for a terminal.
    pub fn summary(&self) -> String {
        let mut lines: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| lines.push((k.to_string(), v));
        push("command", self.command.clone());
        if let Some(s) = &self.scenario {
            let phi = s.state.phi.map(|p| format!(" phi={p}")).unwrap_or_default();
            push(
                "state",
                format!("n={} pattern={} p={}{}", s.state.n, s.state.pattern, s.state.p, phi),
            );
            push("shots/run", s.shots_per_run.to_string());
            push("seed", s.seed.to_string());
        }
        if let Some(z) = &self.runs.z {
            push(
                "z run",
                format!(
                    "pattern {} / complement {} / stray {}  p_hat={}",
                    z.pattern_count,
                    z.complement_count,
                    z.stray_count,
                    z.p_hat.map_or("n/a".into(), |p| format!("{p:.5}"))
                ),
            );
        }
        for (name, run) in [
            ("hadamard run", &self.runs.hadamard),
            ("shifted run", &self.runs.shifted),
        ] {
            if let Some(r) = run {
                push(
                    name,
                    format!(
                        "even {}/{}  p_even_hat={:.5}  CI [{:.5}, {:.5}]",
                        r.even_count, r.total, r.p_even_hat, r.ci_low, r.ci_high
                    ),
                );
            }
        }
        if let Some(e) = &self.phase_estimate {
            push("phi_hat", format!("{:.6} rad ({:?})", e.phi_hat, e.quality));
            push("phi CI", format_arc(&e.interval));
        }
        if let Some(d) = &self.decision {
            push("verdict", format!("{:?}", d.verdict));
            if let Some(p) = d.p_value {
                push("p-value", format!("{p:.3e}"));
            }
            if let Some(p) = d.p_value_shift {
                push("p-value (shifted)", format!("{p:.3e}"));
            }
        }
        if let Some(r) = &self.replay {
            push("record", format!("{} (n={}, seed={})", r.source, r.n, r.seed));
            push(
                "parity",
                format!(
                    "even {}/{}  p_even_hat={:.5}  CI [{:.5}, {:.5}]",
                    r.parity.even_count, r.parity.total, r.parity.p_even_hat, r.parity.ci_low, r.parity.ci_high
                ),
            );
            if let Some(z) = &r.pattern_statistics {
                push(
                    "pattern",
                    format!("{} / {} / stray {}", z.pattern_count, z.complement_count, z.stray_count),
                );
            }
        }
        push("elapsed", format!("{:.1} ms", self.timing.elapsed_ms));
        let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        lines.into_iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    }
}

fn format_arc(arc: &CircularInterval) -> String {
    if arc.width >= std::f64::consts::TAU {
        "full circle".to_string()
    } else {
        format!("[{:.6}, {:.6}] width {:.6}", arc.low, arc.high, arc.width)
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One sweep grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub p: f64,
    pub phi: Option<f64>,
    pub analytic_p_even: f64,
    pub p_even_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub even_count: u64,
    pub total: u64,
    pub seed: u64,
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| CliError::Failure(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut out =
                String::from("parameter,value,p,phi,analytic_p_even,p_even_hat,ci_low,ci_high,even_count,total,seed\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.parameter,
                    r.value,
                    r.p,
                    r.phi.map(|v| v.to_string()).unwrap_or_default(),
                    r.analytic_p_even,
                    r.p_even_hat,
                    r.ci_low,
                    r.ci_high,
                    r.even_count,
                    r.total,
                    r.seed
                );
            }
            Ok(out)
        }
    }
}
