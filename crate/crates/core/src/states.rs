//! The two-component pure state family, its classical mixture counterpart,
//! and dense amplitude vectors.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::BasisString;
use crate::error::{Error, Result};

/// Largest qubit count for which a full `2^n` amplitude array is built.
pub const DENSE_CAP: usize = 24;

/// Tolerance on `Σ|a|² = 1` for a [`StateVector`].
pub const NORM_TOLERANCE: f64 = 1e-12;

fn check_weight(p: f64) -> Result<f64> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(Error::InvalidWeight(p))
    }
}

/// Reduce an angle into `[0, 2π)`.
pub fn normalize_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shortest signed distance from `b` to `a` on the circle, in `(-π, π]`.
pub fn circular_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

/// `√p |pattern⟩ + e^{iφ} √(1−p) |complement⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoComponentState {
    pattern: BasisString,
    p: f64,
    phi: f64,
}

impl TwoComponentState {
    pub fn new(pattern: BasisString, p: f64, phi: f64) -> Result<Self> {
        let p = check_weight(p)?;
        if !phi.is_finite() {
            return Err(Error::InvalidArgument(format!("phase {phi} is not finite")));
        }
        Ok(Self {
            pattern,
            p,
            phi: normalize_angle(phi),
        })
    }

    pub fn pattern(&self) -> BasisString {
        self.pattern
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Relative phase in `[0, 2π)`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The same state after the local `|ī⟩ → e^{iπ/2}|ī⟩` shift on one qubit.
    pub fn phase_shifted(&self) -> Self {
        Self {
            phi: normalize_angle(self.phi + FRAC_PI_2),
            ..*self
        }
    }

    /// Amplitudes of the pattern and complement branches.
    pub fn branch_amplitudes(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.p.sqrt(), 0.0),
            Complex64::from_polar((1.0 - self.p).sqrt(), self.phi),
        )
    }
}

/// `p |pattern⟩⟨pattern| + (1−p) |complement⟩⟨complement|`, stored by its
/// parameters only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTwoMixture {
    pattern: BasisString,
    p: f64,
}

impl ClassicalTwoMixture {
    pub fn new(pattern: BasisString, p: f64) -> Result<Self> {
        Ok(Self {
            pattern,
            p: check_weight(p)?,
        })
    }

    pub fn pattern(&self) -> BasisString {
        self.pattern
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Dense normalized amplitudes over all `2^n` basis strings.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wrap raw amplitudes, checking dimension and normalization.
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dense(n)?;
        if amplitudes.len() != 1usize << n {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes for {n} qubits, got {}",
                1usize << n,
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Unnormalized(norm));
        }
        Ok(Self { n, amplitudes })
    }

    /// The computational basis state `|b⟩`.
    pub fn basis(b: BasisString) -> Result<Self> {
        check_dense(b.n())?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1usize << b.n()];
        amplitudes[b.index() as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n: b.n(), amplitudes })
    }

    pub(crate) fn from_parts(n: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << n);
        Self { n, amplitudes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, b: BasisString) -> Result<Complex64> {
        if b.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: b.n(),
            });
        }
        Ok(self.amplitudes[b.index() as usize])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities `|a_k|²` in index order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

pub(crate) fn check_dense(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n));
    }
    if n > DENSE_CAP {
        return Err(Error::Capacity { n, cap: DENSE_CAP });
    }
    Ok(())
}

/// Sparse probability distribution over basis strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    n: usize,
    probabilities: BTreeMap<BasisString, f64>,
}

impl OutcomeDistribution {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (BasisString, f64)>) -> Result<Self> {
        let mut probabilities = BTreeMap::new();
        for (b, w) in entries {
            if b.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: b.n(),
                });
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidArgument(format!("probability {w} for {b}")));
            }
            *probabilities.entry(b).or_insert(0.0) += w;
        }
        Ok(Self { n, probabilities })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, b: &BasisString) -> f64 {
        self.probabilities.get(b).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisString, &f64)> {
        self.probabilities.iter()
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }
}

/// Dense amplitudes of a two-component state.
pub fn build_statevector(state: &TwoComponentState) -> Result<StateVector> {
    let n = state.n();
    check_dense(n)?;
    let (a, b) = state.branch_amplitudes();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1usize << n];
    amplitudes[state.pattern().index() as usize] = a;
    amplitudes[state.pattern().complement().index() as usize] = b;
    Ok(StateVector { n, amplitudes })
}

fn two_point(pattern: BasisString, p: f64) -> OutcomeDistribution {
    let mut probabilities = BTreeMap::new();
    probabilities.insert(pattern, p);
    probabilities.insert(pattern.complement(), 1.0 - p);
    OutcomeDistribution {
        n: pattern.n(),
        probabilities,
    }
}

/// z-basis outcome distribution of the mixture.
pub fn mixture_z_distribution(mix: &ClassicalTwoMixture) -> OutcomeDistribution {
    two_point(mix.pattern(), mix.p())
}

/// z-basis outcome distribution of the pure state; the phase drops out.
pub fn pure_z_distribution(state: &TwoComponentState) -> OutcomeDistribution {
    two_point(state.pattern(), state.p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn bs(s: &str) -> BasisString {
        s.parse().unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn single_qubit_equal_superposition() {
        let sv = build_statevector(&TwoComponentState::new(bs("0"), 0.5, 0.0).unwrap()).unwrap();
        for a in sv.amplitudes() {
            assert!(close(*a, Complex64::new(FRAC_1_SQRT_2, 0.0)));
        }
    }

    #[test]
    fn bell_state() {
        let sv = build_statevector(&TwoComponentState::new(bs("01"), 0.5, 0.0).unwrap()).unwrap();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        assert!(close(sv.amplitude(bs("01")).unwrap(), h));
        assert!(close(sv.amplitude(bs("10")).unwrap(), h));
        assert_eq!(sv.amplitude(bs("00")).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(sv.amplitude(bs("11")).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn three_qubit_quarter_weight_with_imaginary_branch() {
        let sv = build_statevector(&TwoComponentState::new(bs("000"), 0.25, PI / 2.0).unwrap()).unwrap();
        assert!(close(sv.amplitude(bs("000")).unwrap(), Complex64::new(0.5, 0.0)));
        assert!(close(
            sv.amplitude(bs("111")).unwrap(),
            Complex64::new(0.0, 0.75f64.sqrt())
        ));
    }

    #[test]
    fn capacity_error_names_cap() {
        let state = TwoComponentState::new(BasisString::zeros(25).unwrap(), 0.5, 0.0).unwrap();
        let err = build_statevector(&state).unwrap_err();
        assert_eq!(err, Error::Capacity { n: 25, cap: 24 });
        assert!(err.to_string().contains("24"));
    }

    #[test]
    fn boundary_weights_rejected() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(TwoComponentState::new(bs("00"), p, 0.0).is_err());
            assert!(ClassicalTwoMixture::new(bs("00"), p).is_err());
        }
    }

    #[test]
    fn phase_is_normalized() {
        let s = TwoComponentState::new(bs("0"), 0.5, -PI / 2.0).unwrap();
        assert!((s.phi() - 1.5 * PI).abs() < 1e-15);
        let s = TwoComponentState::new(bs("0"), 0.5, TAU).unwrap();
        assert_eq!(s.phi(), 0.0);
        assert!((circular_difference(0.1, TAU - 0.1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn mixture_distributions() {
        let d = mixture_z_distribution(&ClassicalTwoMixture::new(bs("00"), 0.3).unwrap());
        assert_eq!(d.get(&bs("00")), 0.3);
        assert_eq!(d.get(&bs("11")), 0.7);
        assert_eq!(d.len(), 2);

        let d = mixture_z_distribution(&ClassicalTwoMixture::new(bs("1"), 0.5).unwrap());
        assert_eq!(d.get(&bs("1")), 0.5);
        assert_eq!(d.get(&bs("0")), 0.5);

        let d = mixture_z_distribution(&ClassicalTwoMixture::new(bs("0101"), 0.9).unwrap());
        assert_eq!(d.get(&bs("0101")), 0.9);
        assert!((d.get(&bs("1010")) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn pure_distribution_ignores_phase() {
        for phi in [0.0, 1.0, 2.0, 4.0] {
            let d = pure_z_distribution(&TwoComponentState::new(bs("00"), 0.3, phi).unwrap());
            assert_eq!(d.get(&bs("00")), 0.3);
            assert_eq!(d.get(&bs("11")), 0.7);
        }
        let d = pure_z_distribution(&TwoComponentState::new(bs("010"), 0.5, PI / 3.0).unwrap());
        assert_eq!(d.get(&bs("010")), 0.5);
        assert_eq!(d.get(&bs("101")), 0.5);
    }

    #[test]
    fn normalization_grid() {
        for n in 1..=10 {
            for pi in 1..=99 {
                let p = pi as f64 / 100.0;
                for k in 0..=12 {
                    let phi = TAU * k as f64 / 12.0;
                    let s = TwoComponentState::new(BasisString::zeros(n).unwrap(), p, phi).unwrap();
                    let sv = build_statevector(&s).unwrap();
                    assert!((sv.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE);
                }
            }
        }
    }

    #[test]
    fn pure_and_mixture_identical_on_grid() {
        for n in 1..=10usize {
            for pi in 1..=99 {
                let p = pi as f64 / 100.0;
                let pattern = BasisString::new(n, (pi as u64 * 2654435761) & ((1 << n) - 1)).unwrap();
                let mix = mixture_z_distribution(&ClassicalTwoMixture::new(pattern, p).unwrap());
                for k in 0..=12 {
                    let phi = TAU * k as f64 / 12.0;
                    let pure = pure_z_distribution(&TwoComponentState::new(pattern, p, phi).unwrap());
                    assert_eq!(pure, mix);
                }
            }
        }
    }
}
