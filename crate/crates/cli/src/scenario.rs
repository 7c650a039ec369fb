//! Scenario files: a TOML document describing the preparation and the run
//! parameters. Command-line flags override file values.

use std::path::Path;

use mtc_core::protocol::{
    Backend, RunShots, DEFAULT_ALPHA, DEFAULT_BOOTSTRAP_REPLICATES, DEFAULT_DEGENERACY_THRESHOLD,
};
use mtc_core::{BasisString, ClassicalTwoMixture, Preparation, ProtocolConfig, TwoComponentState, DENSE_CAP};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<StateKind>,
    pub n: usize,
    pub pattern: String,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

/// A grid value: a plain number or a multiple of π such as `"pi/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    Number(f64),
    Expr(String),
}

impl GridValue {
    pub fn resolve(&self) -> Result<f64, CliError> {
        match self {
            GridValue::Number(x) => Ok(*x),
            GridValue::Expr(s) => parse_angle(s),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<GridValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<GridValue>>,
}

fn default_shots() -> usize {
    10_000
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_threshold() -> f64 {
    DEFAULT_DEGENERACY_THRESHOLD
}
fn default_replicates() -> usize {
    DEFAULT_BOOTSTRAP_REPLICATES
}
fn default_workers() -> usize {
    1
}
fn default_shift_qubit() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub state: StateSpec,
    #[serde(default = "default_shots")]
    pub shots_per_run: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_threshold")]
    pub degeneracy_threshold: f64,
    #[serde(default = "default_replicates")]
    pub bootstrap_replicates: usize,
    #[serde(default)]
    pub max_stray_fraction: f64,
    #[serde(default = "default_shift_qubit")]
    pub shift_qubit: usize,
    #[serde(default)]
    pub backend: Backend,
    /// Does not influence results, so it is left out of report echoes.
    #[serde(default = "default_workers", skip_serializing)]
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub alpha: Option<f64>,
    pub workers: Option<usize>,
    pub backend: Option<Backend>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.shots {
            self.shots_per_run = v;
        }
        if let Some(v) = o.alpha {
            self.alpha = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(v) = o.backend {
            self.backend = v;
        }
    }

    pub fn kind(&self) -> Result<StateKind, CliError> {
        match (self.state.kind, self.state.phi) {
            (Some(StateKind::Mixture), Some(_)) => Err(CliError::Config(
                "a mixture has no relative phase; remove phi or set kind = \"pure\"".into(),
            )),
            (Some(StateKind::Pure), None) => Err(CliError::Config("kind = \"pure\" requires phi".into())),
            (Some(k), _) => Ok(k),
            (None, Some(_)) => Ok(StateKind::Pure),
            (None, None) => Ok(StateKind::Mixture),
        }
    }

    pub fn pattern(&self) -> Result<BasisString, CliError> {
        let pattern: BasisString = self.state.pattern.parse().map_err(CliError::from_config)?;
        if pattern.n() != self.state.n {
            return Err(CliError::Config(format!(
                "pattern {:?} has {} bits but n = {}",
                self.state.pattern,
                pattern.n(),
                self.state.n
            )));
        }
        Ok(pattern)
    }

    /// Preparation with an explicit `p` and `phi`, for sweeps.
    pub fn preparation_with(&self, p: f64, phi: Option<f64>) -> Result<Preparation, CliError> {
        let pattern = self.pattern()?;
        Ok(match phi {
            Some(phi) => Preparation::Pure(TwoComponentState::new(pattern, p, phi).map_err(CliError::from_config)?),
            None => Preparation::Mixture(ClassicalTwoMixture::new(pattern, p).map_err(CliError::from_config)?),
        })
    }

    pub fn preparation(&self) -> Result<Preparation, CliError> {
        let phi = match self.kind()? {
            StateKind::Pure => self.state.phi,
            StateKind::Mixture => None,
        };
        self.preparation_with(self.state.p, phi)
    }

    pub fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            shots: RunShots::equal(self.shots_per_run),
            seed: self.seed,
            alpha: self.alpha,
            degeneracy_threshold: self.degeneracy_threshold,
            bootstrap_replicates: self.bootstrap_replicates,
            max_stray_fraction: self.max_stray_fraction,
            shift_qubit: self.shift_qubit,
            backend: self.backend,
            workers: self.workers,
        }
    }

    /// Check every field before any run starts.
    pub fn validate(&self) -> Result<Preparation, CliError> {
        let prep = self.preparation()?;
        if self.backend == Backend::Dense && self.state.n > DENSE_CAP {
            return Err(CliError::Capacity(format!(
                "{} qubits exceeds the dense capacity of {DENSE_CAP}; use backend = \"analytic\"",
                self.state.n
            )));
        }
        if self.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if self.bootstrap_replicates == 0 {
            return Err(CliError::Config("bootstrap_replicates must be at least 1".into()));
        }
        self.protocol_config().validate().map_err(CliError::from_config)?;
        if self.shift_qubit > self.state.n {
            return Err(CliError::Config(format!(
                "shift_qubit {} outside 1..={}",
                self.shift_qubit, self.state.n
            )));
        }
        Ok(prep)
    }
}

/// Parse `1.25`, `pi`, `-pi/2`, `3pi/4`, `2*pi`.
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let bad = || CliError::Config(format!("cannot parse grid value {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?;
    let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
    let k = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(k * std::f64::consts::PI / den)
}

/// Comma-separated grid from the command line.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_angle).collect()
}
