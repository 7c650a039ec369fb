//! Relative-phase extraction and entangled-versus-mixture discrimination.
//!
//! Both procedures use up to three measurement runs on fresh copies of the
//! preparation:
//!
//! 1. z basis, giving the branch weight `p̂`;
//! 2. Hadamard on every qubit then z, giving `p̂_even ≈ 1/2 + √(p(1−p)) cos φ`;
//! 3. the `e^{iπ/2}` shift on one qubit, then Hadamard and z, giving
//!    `p̂′_even ≈ 1/2 − √(p(1−p)) sin φ`.
//!
//! Runs 2 and 3 together fix φ on the full circle; run 2 alone only fixes
//! `cos φ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::basis::BasisString;
use crate::bootstrap::{central_arc, CircularInterval};
use crate::error::{Error, Result};
use crate::gates::{
    analytic_mixture_post_hadamard, analytic_post_hadamard, apply_hadamard_all, apply_phase_shift, eq_p_even,
};
use crate::measurement::{
    tally_parity, tally_pattern, DenseSampler, EnsembleSampler, MeasurementRecord, ParityStatistics, PatternStatistics,
    Sampler, ShotSource,
};
use crate::rng::derive_seed;
use crate::states::{
    build_statevector, mixture_z_distribution, normalize_angle, pure_z_distribution, ClassicalTwoMixture, StateVector,
    TwoComponentState,
};
use crate::stats::{binomial_test_two_sided, check_alpha, z_critical};

pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 0.05;
pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_BOOTSTRAP_REPLICATES: usize = 1000;

fn check_weight(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeight(p))
    }
}

/// `1/2 + √(p(1−p)) cos φ`.
pub fn analytic_p_even(p: f64, phi: f64) -> Result<f64> {
    check_weight(p)?;
    Ok(eq_p_even(p, phi))
}

/// Even-parity probability after the phase shift: `1/2 − √(p(1−p)) sin φ`.
pub fn analytic_p_even_shifted(p: f64, phi: f64) -> Result<f64> {
    check_weight(p)?;
    Ok(0.5 - (p * (1.0 - p)).sqrt() * phi.sin())
}

/// Invert the pair of parity probabilities at the default degeneracy threshold.
pub fn invert_phase(p_hat: f64, p_even_hat: f64, p_even_shift_hat: f64) -> Result<f64> {
    invert_phase_with_threshold(p_hat, p_even_hat, p_even_shift_hat, DEFAULT_DEGENERACY_THRESHOLD)
}

pub fn invert_phase_with_threshold(p_hat: f64, p_even_hat: f64, p_even_shift_hat: f64, threshold: f64) -> Result<f64> {
    check_weight(p_hat)?;
    for q in [p_even_hat, p_even_shift_hat] {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidArgument(format!("probability {q} outside [0, 1]")));
        }
    }
    let amplitude = (p_hat * (1.0 - p_hat)).sqrt();
    if amplitude < threshold {
        return Err(Error::NearDegenerate { amplitude, threshold });
    }
    Ok(raw_inversion(amplitude, p_even_hat, p_even_shift_hat))
}

fn raw_inversion(amplitude: f64, p_even: f64, p_even_shift: f64) -> f64 {
    let c = ((p_even - 0.5) / amplitude).clamp(-1.0, 1.0);
    let s = ((0.5 - p_even_shift) / amplitude).clamp(-1.0, 1.0);
    normalize_angle(s.atan2(c))
}

/// Smallest shot count whose worst-case normal-approximation half-width
/// `z_{α/2} √(0.25/N)` is at most `halfwidth`.
pub fn plan_shots(halfwidth: f64, alpha: f64) -> Result<u64> {
    if !(halfwidth > 0.0 && halfwidth < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "half-width {halfwidth} outside (0, 0.5)"
        )));
    }
    let z = z_critical(alpha)?;
    let mut n = ((z / (2.0 * halfwidth)).powi(2)).ceil().max(1.0) as u64;
    // guard against the ceil landing one off after rounding
    while n > 1 && z * (0.25 / (n - 1) as f64).sqrt() <= halfwidth {
        n -= 1;
    }
    while z * (0.25 / n as f64).sqrt() > halfwidth {
        n += 1;
    }
    Ok(n)
}

/// How the measurement statistics of each run are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Dense state vectors; limited to the dense cap.
    #[default]
    Dense,
    /// Closed-form distributions; any qubit count up to 64.
    Analytic,
}

/// The three measurement settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    ZBasis,
    Hadamard,
    ShiftedHadamard,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::ZBasis, Stage::Hadamard, Stage::ShiftedHadamard];

    pub fn index(&self) -> u64 {
        match self {
            Stage::ZBasis => 0,
            Stage::Hadamard => 1,
            Stage::ShiftedHadamard => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Stage::ZBasis => "z",
            Stage::Hadamard => "hadamard",
            Stage::ShiftedHadamard => "shifted-hadamard",
        }
    }
}

/// A source of identical copies of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Preparation {
    Pure(TwoComponentState),
    Mixture(ClassicalTwoMixture),
}

impl Preparation {
    pub fn pattern(&self) -> BasisString {
        match self {
            Preparation::Pure(s) => s.pattern(),
            Preparation::Mixture(m) => m.pattern(),
        }
    }

    pub fn n(&self) -> usize {
        self.pattern().n()
    }

    pub fn p(&self) -> f64 {
        match self {
            Preparation::Pure(s) => s.p(),
            Preparation::Mixture(m) => m.p(),
        }
    }

    /// Exact `(p, p_even, p′_even)` for this preparation.
    pub fn exact_probabilities(&self) -> (f64, f64, f64) {
        match self {
            Preparation::Pure(s) => (
                s.p(),
                analytic_post_hadamard(s).p_even,
                analytic_post_hadamard(&s.phase_shifted()).p_even,
            ),
            Preparation::Mixture(m) => (m.p(), 0.5, 0.5),
        }
    }

    fn dense_stage(&self, sv: StateVector, stage: Stage, shift_qubit: usize) -> Result<StateVector> {
        Ok(match stage {
            Stage::ZBasis => sv,
            Stage::Hadamard => apply_hadamard_all(sv),
            Stage::ShiftedHadamard => {
                let reference_bit = self.pattern().bit(shift_qubit)?;
                apply_hadamard_all(apply_phase_shift(sv, shift_qubit, reference_bit)?)
            }
        })
    }

    /// Shot source for one measurement setting.
    pub fn source(&self, stage: Stage, backend: Backend, shift_qubit: usize) -> Result<Box<dyn ShotSource>> {
        self.pattern().bit(shift_qubit)?;
        match (backend, self) {
            (Backend::Analytic, Preparation::Pure(s)) => Ok(match stage {
                Stage::ZBasis => Box::new(pure_z_distribution(s)),
                Stage::Hadamard => Box::new(analytic_post_hadamard(s)),
                Stage::ShiftedHadamard => Box::new(analytic_post_hadamard(&s.phase_shifted())),
            }),
            (Backend::Analytic, Preparation::Mixture(m)) => Ok(match stage {
                Stage::ZBasis => Box::new(mixture_z_distribution(m)),
                Stage::Hadamard | Stage::ShiftedHadamard => Box::new(analytic_mixture_post_hadamard(m)),
            }),
            (Backend::Dense, Preparation::Pure(s)) => {
                let sv = self.dense_stage(build_statevector(s)?, stage, shift_qubit)?;
                Ok(Box::new(DenseSampler::new(&sv)?))
            }
            (Backend::Dense, Preparation::Mixture(m)) => {
                let a = self.dense_stage(StateVector::basis(m.pattern())?, stage, shift_qubit)?;
                let b = self.dense_stage(StateVector::basis(m.pattern().complement())?, stage, shift_qubit)?;
                Ok(Box::new(EnsembleSampler::new(vec![(m.p(), a), (1.0 - m.p(), b)])?))
            }
        }
    }
}

/// Per-run shot counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunShots {
    pub z: usize,
    pub hadamard: usize,
    pub shifted: usize,
}

impl RunShots {
    pub fn equal(per_run: usize) -> Self {
        Self {
            z: per_run,
            hadamard: per_run,
            shifted: per_run,
        }
    }

    /// Split a total budget equally; the remainder goes to the earliest runs.
    pub fn split(total: usize) -> Self {
        let base = total / 3;
        let rem = total % 3;
        Self {
            z: base + usize::from(rem > 0),
            hadamard: base + usize::from(rem > 1),
            shifted: base,
        }
    }

    pub fn for_stage(&self, stage: Stage) -> usize {
        match stage {
            Stage::ZBasis => self.z,
            Stage::Hadamard => self.hadamard,
            Stage::ShiftedHadamard => self.shifted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub shots: RunShots,
    pub seed: u64,
    pub alpha: f64,
    pub degeneracy_threshold: f64,
    pub bootstrap_replicates: usize,
    /// Largest tolerated fraction of z-basis shots outside `{pattern, complement}`.
    pub max_stray_fraction: f64,
    /// 1-based qubit that receives the phase shift.
    pub shift_qubit: usize,
    pub backend: Backend,
    pub workers: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            shots: RunShots::equal(10_000),
            seed: 0,
            alpha: DEFAULT_ALPHA,
            degeneracy_threshold: DEFAULT_DEGENERACY_THRESHOLD,
            bootstrap_replicates: DEFAULT_BOOTSTRAP_REPLICATES,
            max_stray_fraction: 0.0,
            shift_qubit: 1,
            backend: Backend::Dense,
            workers: 1,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if Stage::ALL.iter().any(|s| self.shots.for_stage(*s) == 0) {
            return Err(Error::ZeroShots);
        }
        if !(self.degeneracy_threshold >= 0.0 && self.degeneracy_threshold <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "degeneracy threshold {} outside [0, 0.5]",
                self.degeneracy_threshold
            )));
        }
        if !(0.0..=1.0).contains(&self.max_stray_fraction) {
            return Err(Error::InvalidArgument(format!(
                "stray fraction {} outside [0, 1]",
                self.max_stray_fraction
            )));
        }
        if self.shift_qubit == 0 {
            return Err(Error::InvalidArgument("shift qubit is 1-based".into()));
        }
        Ok(())
    }

    /// Seed owned by one run.
    pub fn stage_seed(&self, stage: Stage) -> u64 {
        derive_seed(self.seed, stage.index())
    }

    pub fn bootstrap_seed(&self) -> u64 {
        derive_seed(self.seed, 3)
    }

    fn sampler(&self) -> Sampler {
        Sampler::new(self.workers)
    }

    /// Sample one run of `prep` under this configuration.
    pub fn measure(&self, prep: &Preparation, stage: Stage) -> Result<MeasurementRecord> {
        let source = prep.source(stage, self.backend, self.shift_qubit)?;
        let sampler = self.sampler();
        sampler.install(|| {
            sampler.sample(
                source.as_ref(),
                self.shots.for_stage(stage),
                self.stage_seed(stage),
                stage.label(),
            )
        })
    }

    fn check_family(&self, z: &PatternStatistics) -> Result<()> {
        if z.stray_fraction() > self.max_stray_fraction || z.p_hat.is_none() {
            return Err(Error::OutsideFamily {
                stray: z.stray_count,
                total: z.total,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateQuality {
    Ok,
    /// `√(p̂(1−p̂))` is below the threshold: the parity signal vanishes and
    /// the phase is unidentifiable.
    NearDegenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    pub phi_hat: f64,
    pub p_hat: f64,
    pub p_even_hat: f64,
    pub p_even_shift_hat: f64,
    pub interval: CircularInterval,
    pub shots_used: RunShots,
    pub quality: EstimateQuality,
}

/// Everything measured and derived by one phase-extraction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseExtraction {
    pub z: PatternStatistics,
    pub hadamard: ParityStatistics,
    pub shifted: ParityStatistics,
    pub estimate: PhaseEstimate,
    /// Raw records of the z, Hadamard and shifted runs, in that order.
    #[serde(skip)]
    pub records: Vec<MeasurementRecord>,
}

/// Parametric bootstrap of the phase: resample the three binomial counts at
/// their point estimates and re-invert each replicate.
pub fn bootstrap_phase(
    phi_hat: f64,
    pattern_trials: (u64, f64),
    even_trials: (u64, f64),
    shift_trials: (u64, f64),
    replicates: usize,
    alpha: f64,
    seed: u64,
) -> Result<CircularInterval> {
    let binomial = |(n, p): (u64, f64)| Binomial::new(n, p).map_err(|e| Error::InvalidArgument(e.to_string()));
    let (bp, be, bs) = (
        binomial(pattern_trials)?,
        binomial(even_trials)?,
        binomial(shift_trials)?,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let p = bp.sample(&mut rng) as f64 / pattern_trials.0 as f64;
        let e = be.sample(&mut rng) as f64 / even_trials.0 as f64;
        let s = bs.sample(&mut rng) as f64 / shift_trials.0 as f64;
        let amplitude = (p * (1.0 - p)).sqrt();
        if amplitude > 0.0 {
            samples.push(raw_inversion(amplitude, e, s));
        }
    }
    Ok(central_arc(phi_hat, &samples, alpha))
}

/// Phase estimate from the three runs' statistics.
pub fn estimate_phase(
    z: &PatternStatistics,
    hadamard: &ParityStatistics,
    shifted: &ParityStatistics,
    config: &ProtocolConfig,
) -> Result<PhaseEstimate> {
    config.check_family(z)?;
    let p_hat = z.p_hat.expect("checked by check_family");
    let shots_used = RunShots {
        z: z.total as usize,
        hadamard: hadamard.total as usize,
        shifted: shifted.total as usize,
    };
    let amplitude = (p_hat * (1.0 - p_hat)).sqrt();
    let (phi_hat, interval, quality) = if amplitude < config.degeneracy_threshold || amplitude == 0.0 {
        let phi = if amplitude > 0.0 {
            raw_inversion(amplitude, hadamard.p_even_hat, shifted.p_even_hat)
        } else {
            0.0
        };
        (phi, CircularInterval::full_circle(phi), EstimateQuality::NearDegenerate)
    } else {
        let phi = raw_inversion(amplitude, hadamard.p_even_hat, shifted.p_even_hat);
        let interval = bootstrap_phase(
            phi,
            (z.pattern_count + z.complement_count, p_hat),
            (hadamard.total, hadamard.p_even_hat),
            (shifted.total, shifted.p_even_hat),
            config.bootstrap_replicates,
            config.alpha,
            config.bootstrap_seed(),
        )?;
        (phi, interval, EstimateQuality::Ok)
    };
    Ok(PhaseEstimate {
        phi_hat,
        p_hat,
        p_even_hat: hadamard.p_even_hat,
        p_even_shift_hat: shifted.p_even_hat,
        interval,
        shots_used,
        quality,
    })
}

/// Execute all three runs on `prep` and estimate its relative phase.
pub fn run_phase_extraction(prep: &Preparation, config: &ProtocolConfig) -> Result<PhaseExtraction> {
    config.validate()?;
    let z_record = config.measure(prep, Stage::ZBasis)?;
    let z = tally_pattern(&z_record, prep.pattern(), config.alpha)?;
    config.check_family(&z)?;
    let h_record = config.measure(prep, Stage::Hadamard)?;
    let hadamard = tally_parity(&h_record, config.alpha)?;
    let s_record = config.measure(prep, Stage::ShiftedHadamard)?;
    let shifted = tally_parity(&s_record, config.alpha)?;
    let estimate = estimate_phase(&z, &hadamard, &shifted, config)?;
    Ok(PhaseExtraction {
        z,
        hadamard,
        shifted,
        estimate,
        records: vec![z_record, h_record, s_record],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entangled,
    ConsistentWithMixture,
    OutsideFamily,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub p_hat: Option<f64>,
    pub p_even_hat: Option<f64>,
    pub p_even_shift_hat: Option<f64>,
    /// Exact two-sided binomial p-value of `p_even = 1/2` on the Hadamard run.
    pub p_value: Option<f64>,
    /// Same test on the phase-shifted run, when it was executed.
    pub p_value_shift: Option<f64>,
    pub alpha: f64,
    pub stray_count: u64,
}

/// Everything measured and derived by one discrimination run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrimination {
    pub z: PatternStatistics,
    pub hadamard: Option<ParityStatistics>,
    pub shifted: Option<ParityStatistics>,
    pub decision: Decision,
    /// Raw records of the runs that were executed, in run order.
    #[serde(skip)]
    pub records: Vec<MeasurementRecord>,
}

fn parity_p_value(stats: &ParityStatistics) -> Result<f64> {
    binomial_test_two_sided(stats.even_count, stats.total, 0.5)
}

/// Verdict from the run statistics. `shifted` is consulted only when the
/// Hadamard run fails to reject `p_even = 1/2`.
pub fn decide(
    z: &PatternStatistics,
    hadamard: Option<&ParityStatistics>,
    shifted: Option<&ParityStatistics>,
    config: &ProtocolConfig,
) -> Result<Decision> {
    let mut decision = Decision {
        verdict: Verdict::Inconclusive,
        p_hat: z.p_hat,
        p_even_hat: None,
        p_even_shift_hat: None,
        p_value: None,
        p_value_shift: None,
        alpha: config.alpha,
        stray_count: z.stray_count,
    };
    if config.check_family(z).is_err() {
        decision.verdict = Verdict::OutsideFamily;
        return Ok(decision);
    }
    let hadamard = hadamard.ok_or_else(|| Error::InvalidArgument("missing Hadamard run".into()))?;
    let p_value = parity_p_value(hadamard)?;
    decision.p_even_hat = Some(hadamard.p_even_hat);
    decision.p_value = Some(p_value);
    if p_value < config.alpha {
        decision.verdict = Verdict::Entangled;
        return Ok(decision);
    }
    let shifted = shifted.ok_or_else(|| Error::InvalidArgument("missing phase-shifted run".into()))?;
    let p_value_shift = parity_p_value(shifted)?;
    decision.p_even_shift_hat = Some(shifted.p_even_hat);
    decision.p_value_shift = Some(p_value_shift);
    let p_hat = z.p_hat.expect("checked by check_family");
    decision.verdict = if p_value_shift < config.alpha {
        Verdict::Entangled
    } else if (p_hat * (1.0 - p_hat)).sqrt() < config.degeneracy_threshold {
        Verdict::Inconclusive
    } else {
        Verdict::ConsistentWithMixture
    };
    Ok(decision)
}

/// Test whether `prep` is the entangled state rather than the classical
/// mixture with the same z-basis statistics.
pub fn run_discrimination(prep: &Preparation, config: &ProtocolConfig) -> Result<Discrimination> {
    config.validate()?;
    let z_record = config.measure(prep, Stage::ZBasis)?;
    let z = tally_pattern(&z_record, prep.pattern(), config.alpha)?;
    let mut records = vec![z_record];
    if config.check_family(&z).is_err() {
        let decision = decide(&z, None, None, config)?;
        return Ok(Discrimination {
            z,
            hadamard: None,
            shifted: None,
            decision,
            records,
        });
    }
    let h_record = config.measure(prep, Stage::Hadamard)?;
    let hadamard = tally_parity(&h_record, config.alpha)?;
    records.push(h_record);
    let mut shifted = None;
    if parity_p_value(&hadamard)? >= config.alpha {
        let s_record = config.measure(prep, Stage::ShiftedHadamard)?;
        shifted = Some(tally_parity(&s_record, config.alpha)?);
        records.push(s_record);
    }
    let decision = decide(&z, Some(&hadamard), shifted.as_ref(), config)?;
    Ok(Discrimination {
        z,
        hadamard: Some(hadamard),
        shifted,
        decision,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn bs(s: &str) -> BasisString {
        s.parse().unwrap()
    }

    fn pure(pattern: &str, p: f64, phi: f64) -> Preparation {
        Preparation::Pure(TwoComponentState::new(bs(pattern), p, phi).unwrap())
    }

    fn mixture(pattern: &str, p: f64) -> Preparation {
        Preparation::Mixture(ClassicalTwoMixture::new(bs(pattern), p).unwrap())
    }

    #[test]
    fn p_even_examples() {
        assert!((analytic_p_even(0.5, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((analytic_p_even(0.5, FRAC_PI_2).unwrap() - 0.5).abs() < 1e-15);
        assert!((analytic_p_even(0.25, PI).unwrap() - (0.5 - 3f64.sqrt() / 4.0)).abs() < 1e-15);
        assert!(analytic_p_even(1.0, 0.0).is_err());
        assert!(analytic_p_even(0.0, 0.0).is_err());
    }

    #[test]
    fn shifted_examples() {
        for p in [0.1f64, 0.3, 0.5] {
            let expected = 0.5 - (p * (1.0 - p)).sqrt();
            assert!((analytic_p_even_shifted(p, FRAC_PI_2).unwrap() - expected).abs() < 1e-15);
            assert_eq!(analytic_p_even_shifted(p, 0.0).unwrap(), 0.5);
        }
        assert!(analytic_p_even_shifted(0.5, FRAC_PI_2).unwrap().abs() < 1e-15);
        assert!((analytic_p_even_shifted(0.5, -FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inversion_examples() {
        assert!(invert_phase(0.5, 1.0, 0.5).unwrap().abs() < 1e-15);
        assert!((invert_phase(0.5, 0.5, 0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let phi = invert_phase(0.25, 0.5 - 3f64.sqrt() / 4.0, 0.5).unwrap();
        assert!((phi - PI).abs() < 1e-12, "{phi}");
        assert!(matches!(
            invert_phase(0.001, 0.5, 0.5),
            Err(Error::NearDegenerate { .. })
        ));
        assert!(invert_phase(0.5, 1.2, 0.5).is_err());
    }

    #[test]
    fn inversion_clamps_noisy_inputs() {
        // sampling noise can push |c| past 1
        let phi = invert_phase(0.5, 1.0, 0.49).unwrap();
        assert!(phi < 0.05);
    }

    #[test]
    fn plan_shots_examples() {
        // z_{0.025} = 1.959964: (z / 0.01)² = 38414.59
        assert_eq!(plan_shots(0.005, 0.05).unwrap(), 38415);
        assert_eq!(plan_shots(0.25, 0.05).unwrap(), 16);
        let mut last = u64::MAX;
        for k in 1..50 {
            let n = plan_shots(k as f64 * 0.0099, 0.05).unwrap();
            assert!(n <= last);
            last = n;
        }
        assert!(plan_shots(0.5 - 1e-9, 0.05).unwrap() <= 4);
        assert!(plan_shots(0.0, 0.05).is_err());
        assert!(plan_shots(0.5, 0.05).is_err());
        assert!(plan_shots(0.1, 1.0).is_err());
    }

    #[test]
    fn exact_probabilities_round_trip() {
        let (p, e, s) = pure("010", 0.3, 2.0).exact_probabilities();
        assert!((invert_phase(p, e, s).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn run_shots_split() {
        assert_eq!(
            RunShots::split(10),
            RunShots {
                z: 4,
                hadamard: 3,
                shifted: 3
            }
        );
        assert_eq!(RunShots::split(9), RunShots::equal(3));
    }

    #[test]
    fn extraction_near_zero_phase() {
        let config = ProtocolConfig {
            shots: RunShots::equal(100_000),
            seed: 2024,
            ..Default::default()
        };
        let run = run_phase_extraction(&pure("000", 0.5, 0.0), &config).unwrap();
        let est = run.estimate;
        assert_eq!(est.quality, EstimateQuality::Ok);
        assert!(est.interval.contains(0.0), "{est:?}");
        assert!(est.interval.width < 0.1);
        assert!(est.interval.contains(est.phi_hat));
    }

    #[test]
    fn extraction_single_qubit() {
        let config = ProtocolConfig {
            shots: RunShots::equal(50_000),
            seed: 5,
            ..Default::default()
        };
        let run = run_phase_extraction(&pure("0", 0.7, 1.2), &config).unwrap();
        assert!((run.estimate.phi_hat - 1.2).abs() < 0.05, "{:?}", run.estimate);
        assert!((run.estimate.p_hat - 0.7).abs() < 0.01);
    }

    #[test]
    fn extraction_flags_degenerate_weight() {
        let config = ProtocolConfig {
            shots: RunShots::equal(2000),
            seed: 1,
            backend: Backend::Analytic,
            ..Default::default()
        };
        let run = run_phase_extraction(&pure("00", 0.0005, 1.0), &config).unwrap();
        assert_eq!(run.estimate.quality, EstimateQuality::NearDegenerate);
        assert_eq!(run.estimate.interval.width, TAU);
    }

    #[test]
    fn strays_are_outside_family() {
        let z = PatternStatistics::from_counts(40, 50, 10, 0.01).unwrap();
        let h = ParityStatistics::from_counts(50, 100, 0.01).unwrap();
        let config = ProtocolConfig::default();
        let d = decide(&z, Some(&h), Some(&h), &config).unwrap();
        assert_eq!(d.verdict, Verdict::OutsideFamily);
        assert_eq!(d.stray_count, 10);
        assert!(matches!(
            estimate_phase(&z, &h, &h, &config),
            Err(Error::OutsideFamily { stray: 10, total: 100 })
        ));
        let lenient = ProtocolConfig {
            max_stray_fraction: 0.2,
            ..config
        };
        assert_ne!(
            decide(&z, Some(&h), Some(&h), &lenient).unwrap().verdict,
            Verdict::OutsideFamily
        );
    }

    #[test]
    fn extreme_weight_is_inconclusive() {
        let z = PatternStatistics::from_counts(100_000, 1, 0, 0.01).unwrap();
        let h = ParityStatistics::from_counts(5000, 10_000, 0.01).unwrap();
        let d = decide(&z, Some(&h), Some(&h), &ProtocolConfig::default()).unwrap();
        assert_eq!(d.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn discrimination_examples() {
        let config = ProtocolConfig {
            shots: RunShots::equal(100_000),
            seed: 77,
            ..Default::default()
        };
        let d = run_discrimination(&mixture("000", 0.3), &config).unwrap();
        assert_eq!(d.decision.verdict, Verdict::ConsistentWithMixture);
        assert!(d.shifted.is_some());

        let d = run_discrimination(&pure("000", 0.5, FRAC_PI_2), &config).unwrap();
        assert_eq!(d.decision.verdict, Verdict::Entangled);
        assert!(d.decision.p_value.unwrap() >= config.alpha);
        assert!(d.decision.p_value_shift.unwrap() < 1e-12);
        assert!(d.decision.p_even_shift_hat.unwrap() < 1e-3);

        let d = run_discrimination(&pure("000", 0.3, 0.0), &config).unwrap();
        assert_eq!(d.decision.verdict, Verdict::Entangled);
        assert!(d.shifted.is_none());
        assert!((d.decision.p_even_hat.unwrap() - (0.5 + 0.21f64.sqrt())).abs() < 0.005);
    }

    #[test]
    fn dense_and_analytic_backends_agree_on_mixture_sampling_shape() {
        let prep = mixture("0110", 0.4);
        for backend in [Backend::Dense, Backend::Analytic] {
            let config = ProtocolConfig {
                backend,
                shots: RunShots::equal(1000),
                ..Default::default()
            };
            let r = config.measure(&prep, Stage::ZBasis).unwrap();
            assert!(r.shots.iter().all(|s| *s == bs("0110") || *s == bs("1001")));
        }
    }

    #[test]
    fn dense_backend_capacity() {
        let prep = Preparation::Pure(TwoComponentState::new(BasisString::zeros(30).unwrap(), 0.5, 0.0).unwrap());
        let config = ProtocolConfig::default();
        assert_eq!(
            run_phase_extraction(&prep, &config).unwrap_err(),
            Error::Capacity { n: 30, cap: 24 }
        );
        let analytic = ProtocolConfig {
            backend: Backend::Analytic,
            shots: RunShots::equal(2000),
            ..config
        };
        assert!(run_phase_extraction(&prep, &analytic).is_ok());
    }

    #[test]
    fn invalid_shift_qubit() {
        let config = ProtocolConfig {
            shift_qubit: 4,
            ..Default::default()
        };
        assert!(matches!(
            run_phase_extraction(&pure("000", 0.5, 0.0), &config),
            Err(Error::QubitOutOfRange { .. })
        ));
    }
}
