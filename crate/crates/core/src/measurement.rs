//! z-basis shot sampling with reproducible randomness, and parity / pattern
//! tallies over the resulting records.

use std::fmt::Write as _;
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{low_mask, BasisString};
use crate::error::{Error, Result};
use crate::gates::ParityDistribution;
use crate::rng::CounterRng;
use crate::states::{check_dense, OutcomeDistribution, StateVector};
use crate::stats::wilson_interval;

/// Tolerance on the total mass of a sampled distribution.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Shots generated per unit of parallel work.
const SHOT_CHUNK: usize = 1024;

/// Anything that can produce one measured basis string from a positioned
/// random stream. Implementations may take at most four `u64` draws per shot.
pub trait ShotSource: Sync {
    fn n(&self) -> usize;

    /// Reject sources whose probabilities do not sum to one.
    fn validate(&self) -> Result<()>;

    fn draw(&self, rng: &mut CounterRng) -> BasisString;
}

fn check_mass(total: f64) -> Result<()> {
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE || !total.is_finite() {
        Err(Error::Unnormalized(total))
    } else {
        Ok(())
    }
}

impl ShotSource for OutcomeDistribution {
    fn n(&self) -> usize {
        OutcomeDistribution::n(self)
    }

    fn validate(&self) -> Result<()> {
        check_mass(self.total())
    }

    fn draw(&self, rng: &mut CounterRng) -> BasisString {
        let u = rng.next_f64() * self.total();
        let mut acc = 0.0;
        let mut last = None;
        for (b, w) in self.iter() {
            if *w > 0.0 {
                acc += w;
                last = Some(*b);
                if u < acc {
                    return *b;
                }
            }
        }
        last.expect("validated distribution has positive mass")
    }
}

impl ShotSource for ParityDistribution {
    fn n(&self) -> usize {
        self.n
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_even) {
            return Err(Error::Unnormalized(self.p_even));
        }
        check_mass(self.p_even + self.p_odd)
    }

    /// Chooses the parity sector, then a uniform string inside it: qubits
    /// `1..n-1` are free and qubit `n` fixes the parity.
    fn draw(&self, rng: &mut CounterRng) -> BasisString {
        let even = rng.next_f64() < self.p_even;
        let free = if self.n > 1 {
            (rng.next_u64() & low_mask(self.n - 1)) << 1
        } else {
            0
        };
        let odd_free = free.count_ones() % 2 == 1;
        let last = if odd_free == even { 1 } else { 0 };
        BasisString::from_raw(self.n, free | last)
    }
}

/// Born-rule sampler over a dense state vector via a cumulative table.
#[derive(Debug, Clone)]
pub struct DenseSampler {
    n: usize,
    cumulative: Vec<f64>,
}

impl DenseSampler {
    pub fn new(sv: &StateVector) -> Result<Self> {
        check_dense(sv.n())?;
        let mut acc = 0.0;
        let cumulative: Vec<f64> = sv
            .amplitudes()
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        check_mass(acc)?;
        Ok(Self { n: sv.n(), cumulative })
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().expect("non-empty table")
    }
}

impl ShotSource for DenseSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn validate(&self) -> Result<()> {
        check_mass(self.total())
    }

    fn draw(&self, rng: &mut CounterRng) -> BasisString {
        let x = rng.next_f64() * self.total();
        let idx = self
            .cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1);
        BasisString::from_raw(self.n, idx as u64)
    }
}

/// Classical ensemble of dense states: each shot first picks a member by
/// weight, then samples it.
#[derive(Debug, Clone)]
pub struct EnsembleSampler {
    n: usize,
    members: Vec<(f64, DenseSampler)>,
}

impl EnsembleSampler {
    pub fn new(members: Vec<(f64, StateVector)>) -> Result<Self> {
        let n = members
            .first()
            .map(|(_, sv)| sv.n())
            .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
        let mut out = Vec::with_capacity(members.len());
        for (w, sv) in &members {
            if sv.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: sv.n(),
                });
            }
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidArgument(format!("ensemble weight {w}")));
            }
            out.push((*w, DenseSampler::new(sv)?));
        }
        check_mass(out.iter().map(|(w, _)| w).sum())?;
        Ok(Self { n, members: out })
    }
}

impl ShotSource for EnsembleSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn validate(&self) -> Result<()> {
        check_mass(self.members.iter().map(|(w, _)| w).sum())
    }

    fn draw(&self, rng: &mut CounterRng) -> BasisString {
        let u = rng.next_f64();
        let mut acc = 0.0;
        let mut chosen = &self.members[self.members.len() - 1].1;
        for (w, s) in &self.members {
            acc += w;
            if u < acc {
                chosen = s;
                break;
            }
        }
        chosen.draw(rng)
    }
}

/// Ordered z-basis outcomes plus the seed and label that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub n: usize,
    pub shots: Vec<BasisString>,
    pub seed: u64,
    pub source: String,
}

impl MeasurementRecord {
    pub fn new(n: usize, shots: Vec<BasisString>, seed: u64, source: impl Into<String>) -> Result<Self> {
        if let Some(bad) = shots.iter().find(|s| s.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.n(),
            });
        }
        Ok(Self {
            n,
            shots,
            seed,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    /// Newline-delimited bitstrings after a `# n=<n> seed=<seed> source=<label>` header.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.n + 1) * self.shots.len() + 64);
        let _ = writeln!(out, "# n={} seed={} source={}", self.n, self.seed, self.source);
        for s in &self.shots {
            let _ = writeln!(out, "{s}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read(text.as_bytes())
    }

    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedRecord("missing header".into()))?
            .map_err(|e| Error::MalformedRecord(e.to_string()))?;
        let (n, seed, source) = parse_header(&header)?;
        let mut shots = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::MalformedRecord(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let b: BasisString = line
                .parse()
                .map_err(|_| Error::MalformedRecord(format!("line {}: {line:?}", i + 2)))?;
            if b.n() != n {
                return Err(Error::MalformedRecord(format!(
                    "line {}: {} bits, header says {n}",
                    i + 2,
                    b.n()
                )));
            }
            shots.push(b);
        }
        Self::new(n, shots, seed, source)
    }
}

fn parse_header(line: &str) -> Result<(usize, u64, String)> {
    let bad = || Error::MalformedRecord(format!("bad header {line:?}"));
    let rest = line.strip_prefix('#').ok_or_else(bad)?.trim_start();
    let rest = rest.strip_prefix("n=").ok_or_else(bad)?;
    let (n, rest) = rest.split_once(' ').ok_or_else(bad)?;
    let rest = rest.trim_start().strip_prefix("seed=").ok_or_else(bad)?;
    let (seed, rest) = rest.split_once(' ').ok_or_else(bad)?;
    let source = rest.trim_start().strip_prefix("source=").ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || n > 64 {
        return Err(bad());
    }
    Ok((n, seed.parse().map_err(|_| bad())?, source.to_string()))
}

/// Parallel shot sampler. Shot `k` depends only on `(seed, k)`, so the record
/// is identical for every worker count.
#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    workers: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Self { workers: 1 }
    }
}

impl Sampler {
    pub fn new(workers: usize) -> Self {
        Self {
            workers: workers.max(1),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Run `f` on a pool with this sampler's worker count.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        if self.workers == 1 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.workers).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }

    pub fn sample<S: ShotSource + ?Sized>(
        &self,
        source: &S,
        count: usize,
        seed: u64,
        label: impl Into<String>,
    ) -> Result<MeasurementRecord> {
        if count == 0 {
            return Err(Error::ZeroShots);
        }
        source.validate()?;
        let chunk = |start: usize| -> Vec<BasisString> {
            let end = (start + SHOT_CHUNK).min(count);
            let mut rng = CounterRng::new(seed);
            (start..end)
                .map(|k| {
                    rng.seek(k as u64);
                    source.draw(&mut rng)
                })
                .collect()
        };
        let starts: Vec<usize> = (0..count).step_by(SHOT_CHUNK).collect();
        let shots: Vec<BasisString> = if self.workers == 1 {
            starts.into_iter().flat_map(chunk).collect()
        } else {
            self.install(|| {
                starts
                    .into_par_iter()
                    .map(chunk)
                    .collect::<Vec<_>>()
                    .into_iter()
                    .flatten()
                    .collect()
            })
        };
        MeasurementRecord::new(source.n(), shots, seed, label)
    }
}

/// Single-threaded convenience wrapper around [`Sampler::sample`].
pub fn sample_shots<S: ShotSource + ?Sized>(
    source: &S,
    count: usize,
    seed: u64,
    label: impl Into<String>,
) -> Result<MeasurementRecord> {
    Sampler::default().sample(source, count, seed, label)
}

/// Even-parity tally with a Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityStatistics {
    pub total: u64,
    pub even_count: u64,
    pub p_even_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub alpha: f64,
}

impl ParityStatistics {
    pub fn from_counts(even_count: u64, total: u64, alpha: f64) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(even_count, total, alpha)?;
        Ok(Self {
            total,
            even_count,
            p_even_hat: even_count as f64 / total as f64,
            ci_low,
            ci_high,
            alpha,
        })
    }
}

/// Counts of the reference pattern, its complement, and anything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternStatistics {
    pub total: u64,
    pub pattern_count: u64,
    pub complement_count: u64,
    pub stray_count: u64,
    /// `None` when neither the pattern nor its complement was observed.
    pub p_hat: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub alpha: f64,
}

impl PatternStatistics {
    pub fn from_counts(pattern_count: u64, complement_count: u64, stray_count: u64, alpha: f64) -> Result<Self> {
        let total = pattern_count + complement_count + stray_count;
        if total == 0 {
            return Err(Error::EmptyRecord);
        }
        crate::stats::check_alpha(alpha)?;
        let in_family = pattern_count + complement_count;
        let (p_hat, ci_low, ci_high) = if in_family == 0 {
            (None, None, None)
        } else {
            let (lo, hi) = wilson_interval(pattern_count, in_family, alpha)?;
            (Some(pattern_count as f64 / in_family as f64), Some(lo), Some(hi))
        };
        Ok(Self {
            total,
            pattern_count,
            complement_count,
            stray_count,
            p_hat,
            ci_low,
            ci_high,
            alpha,
        })
    }

    pub fn stray_fraction(&self) -> f64 {
        self.stray_count as f64 / self.total as f64
    }
}

pub fn tally_parity(record: &MeasurementRecord, alpha: f64) -> Result<ParityStatistics> {
    if record.is_empty() {
        return Err(Error::EmptyRecord);
    }
    let even = record.shots.iter().filter(|s| s.is_even()).count() as u64;
    ParityStatistics::from_counts(even, record.len() as u64, alpha)
}

pub fn tally_pattern(record: &MeasurementRecord, pattern: BasisString, alpha: f64) -> Result<PatternStatistics> {
    if record.n != pattern.n() {
        return Err(Error::DimensionMismatch {
            expected: pattern.n(),
            found: record.n,
        });
    }
    if record.is_empty() {
        return Err(Error::EmptyRecord);
    }
    let complement = pattern.complement();
    let (mut hit, mut comp, mut stray) = (0u64, 0u64, 0u64);
    for s in &record.shots {
        if *s == pattern {
            hit += 1;
        } else if *s == complement {
            comp += 1;
        } else {
            stray += 1;
        }
    }
    PatternStatistics::from_counts(hit, comp, stray, alpha)
}
