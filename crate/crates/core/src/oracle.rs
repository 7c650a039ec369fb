//! Brute-force ground truth: dense density operators, explicit matrix
//! products and exhaustive outcome enumeration.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{hadamard_all_in_place, phase_shift_in_place, ParityDistribution};
use crate::states::{ClassicalTwoMixture, StateVector};

/// Largest qubit count for a dense density operator.
pub const DENSITY_CAP: usize = 10;

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = -1e-10;

/// The local operations the protocol uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalUnitary {
    HadamardAll,
    PhaseShift { qubit: usize, reference_bit: u8 },
}

impl LocalUnitary {
    fn apply(&self, column: &mut [Complex64]) -> Result<()> {
        match *self {
            LocalUnitary::HadamardAll => {
                hadamard_all_in_place(column);
                Ok(())
            }
            LocalUnitary::PhaseShift { qubit, reference_bit } => phase_shift_in_place(column, qubit, reference_bit),
        }
    }
}

/// Dense `2^n × 2^n` density operator, n ≤ [`DENSITY_CAP`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseDensityOperator {
    n: usize,
    matrix: DMatrix<Complex64>,
}

/// Deviations from the density-operator axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDiagnostics {
    pub hermitian_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

impl DensityDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.hermitian_deviation <= HERMITIAN_TOLERANCE
            && self.trace_deviation <= TRACE_TOLERANCE
            && self.min_eigenvalue >= PSD_TOLERANCE
    }
}

fn check_density_cap(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n));
    }
    if n > DENSITY_CAP {
        return Err(Error::Capacity { n, cap: DENSITY_CAP });
    }
    Ok(())
}

impl DenseDensityOperator {
    /// `|ψ⟩⟨ψ|`.
    pub fn from_state_vector(sv: &StateVector) -> Result<Self> {
        check_density_cap(sv.n())?;
        let dim = 1usize << sv.n();
        let a = sv.amplitudes();
        Ok(Self {
            n: sv.n(),
            matrix: DMatrix::from_fn(dim, dim, |i, j| a[i] * a[j].conj()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn diagnostics(&self) -> DensityDiagnostics {
        let adj = self.matrix.adjoint();
        let hermitian_deviation = (&self.matrix - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let trace_deviation = (self.trace() - Complex64::new(1.0, 0.0)).norm();
        let hermitian_part = (&self.matrix + adj).scale(0.5);
        let min_eigenvalue = hermitian_part
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        DensityDiagnostics {
            hermitian_deviation,
            trace_deviation,
            min_eigenvalue,
        }
    }

    fn apply_to_columns(matrix: &mut DMatrix<Complex64>, u: LocalUnitary) -> Result<()> {
        let dim = matrix.nrows();
        // column-major storage: each chunk is one column
        for col in matrix.as_mut_slice().chunks_exact_mut(dim) {
            u.apply(col)?;
        }
        Ok(())
    }
}

/// Diagonal operator of the mixture.
pub fn densify_mixture(mix: &ClassicalTwoMixture) -> Result<DenseDensityOperator> {
    let n = mix.n();
    check_density_cap(n)?;
    let dim = 1usize << n;
    let mut matrix = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let a = mix.pattern().index() as usize;
    let b = mix.pattern().complement().index() as usize;
    matrix[(a, a)] = Complex64::new(mix.p(), 0.0);
    matrix[(b, b)] = Complex64::new(1.0 - mix.p(), 0.0);
    Ok(DenseDensityOperator { n, matrix })
}

/// `UρU†`: the gate kernel on every column gives `Uρ`, then
/// `(Uρ)U† = (U(Uρ)†)†` reuses the same kernel.
pub fn evolve_density(rho: &DenseDensityOperator, u: LocalUnitary) -> Result<DenseDensityOperator> {
    let mut m = rho.matrix.clone();
    DenseDensityOperator::apply_to_columns(&mut m, u)?;
    let mut m = m.adjoint();
    DenseDensityOperator::apply_to_columns(&mut m, u)?;
    Ok(DenseDensityOperator {
        n: rho.n,
        matrix: m.adjoint(),
    })
}

/// `H^{⊗n}|ψ⟩` by explicit summation over the `(−1)^{x·y}` matrix entries.
/// Quadratic cost; an independent reference for the butterfly kernel.
pub fn hadamard_by_matrix(sv: &StateVector) -> Result<StateVector> {
    check_density_cap(sv.n())?;
    let dim = 1usize << sv.n();
    let scale = 1.0 / (dim as f64).sqrt();
    let a = sv.amplitudes();
    let out = (0..dim)
        .map(|x| {
            let sum: Complex64 = (0..dim)
                .map(|y| if (x & y).count_ones() % 2 == 0 { a[y] } else { -a[y] })
                .sum();
            sum * scale
        })
        .collect();
    Ok(StateVector::from_parts(sv.n(), out))
}

/// Probability of every basis string plus the exhaustively counted `p_even`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullOutcomeTable {
    pub n: usize,
    pub probabilities: Vec<f64>,
    pub p_even: f64,
}

impl FullOutcomeTable {
    fn from_probabilities(n: usize, probabilities: Vec<f64>) -> Self {
        let p_even = probabilities
            .iter()
            .enumerate()
            .filter(|(k, _)| k.count_ones() % 2 == 0)
            .map(|(_, p)| p)
            .sum();
        Self {
            n,
            probabilities,
            p_even,
        }
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Input to [`enumerate_outcomes`].
#[derive(Debug, Clone, Copy)]
pub enum DenseInput<'a> {
    Vector(&'a StateVector),
    Operator(&'a DenseDensityOperator),
}

impl<'a> From<&'a StateVector> for DenseInput<'a> {
    fn from(sv: &'a StateVector) -> Self {
        DenseInput::Vector(sv)
    }
}

impl<'a> From<&'a DenseDensityOperator> for DenseInput<'a> {
    fn from(rho: &'a DenseDensityOperator) -> Self {
        DenseInput::Operator(rho)
    }
}

pub fn enumerate_outcomes<'a>(input: impl Into<DenseInput<'a>>) -> FullOutcomeTable {
    match input.into() {
        DenseInput::Vector(sv) => FullOutcomeTable::from_probabilities(sv.n(), sv.probabilities()),
        DenseInput::Operator(rho) => FullOutcomeTable::from_probabilities(rho.n(), rho.diagonal()),
    }
}

/// Largest absolute deviation between a closed-form parity distribution and
/// an exhaustive table, over `p_even`, `p_odd` and every string probability.
pub fn cross_check(analytic: &ParityDistribution, table: &FullOutcomeTable) -> Result<f64> {
    if analytic.n != table.n {
        return Err(Error::DimensionMismatch {
            expected: analytic.n,
            found: table.n,
        });
    }
    let mut dev = (analytic.p_even - table.p_even)
        .abs()
        .max((analytic.p_odd - (1.0 - table.p_even)).abs());
    for (k, &p) in table.probabilities.iter().enumerate() {
        let expected = if k.count_ones() % 2 == 0 {
            analytic.per_string_even
        } else {
            analytic.per_string_odd
        };
        dev = dev.max((expected - p).abs());
    }
    Ok(dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisString;
    use crate::gates::{analytic_mixture_post_hadamard, analytic_post_hadamard, apply_hadamard_all};
    use crate::states::{build_statevector, TwoComponentState};
    use std::f64::consts::PI;

    fn bs(s: &str) -> BasisString {
        s.parse().unwrap()
    }

    #[test]
    fn densify_examples() {
        let rho = densify_mixture(&ClassicalTwoMixture::new(bs("0"), 0.5).unwrap()).unwrap();
        assert_eq!(rho.diagonal(), vec![0.5, 0.5]);
        let rho = densify_mixture(&ClassicalTwoMixture::new(bs("01"), 0.3).unwrap()).unwrap();
        let d = rho.diagonal();
        assert_eq!(d[1], 0.3);
        assert_eq!(d[2], 0.7);
        assert_eq!(d[0], 0.0);
        assert_eq!(d[3], 0.0);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!(densify_mixture(&ClassicalTwoMixture::new(BasisString::zeros(11).unwrap(), 0.5).unwrap()).is_err());
    }

    #[test]
    fn hadamard_on_ket_zero_projector() {
        let rho = DenseDensityOperator::from_state_vector(&StateVector::basis(bs("0")).unwrap()).unwrap();
        let out = evolve_density(&rho, LocalUnitary::HadamardAll).unwrap();
        for z in out.matrix().iter() {
            assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn mixture_after_hadamard_has_uniform_diagonal() {
        for pattern in ["0", "01", "110", "10110"] {
            let mix = ClassicalTwoMixture::new(bs(pattern), 0.3).unwrap();
            let out = evolve_density(&densify_mixture(&mix).unwrap(), LocalUnitary::HadamardAll).unwrap();
            let uniform = 0.5f64.powi(mix.n() as i32);
            for d in out.diagonal() {
                assert!((d - uniform).abs() < 1e-12);
            }
            assert!(out.diagnostics().is_valid());
        }
    }

    #[test]
    fn phase_shift_leaves_diagonal_operator_unchanged() {
        let mix = ClassicalTwoMixture::new(bs("0110"), 0.8).unwrap();
        let rho = densify_mixture(&mix).unwrap();
        for qubit in 1..=4 {
            for reference_bit in 0..=1 {
                let out = evolve_density(&rho, LocalUnitary::PhaseShift { qubit, reference_bit }).unwrap();
                assert_eq!(out, rho);
            }
        }
    }

    #[test]
    fn outcome_tables() {
        let bell = build_statevector(&TwoComponentState::new(bs("00"), 0.5, 0.0).unwrap()).unwrap();
        let t = enumerate_outcomes(&apply_hadamard_all(bell));
        assert!((t.probabilities[0] - 0.5).abs() < 1e-15);
        assert!((t.probabilities[3] - 0.5).abs() < 1e-15);
        assert!(t.probabilities[1].abs() < 1e-15 && t.probabilities[2].abs() < 1e-15);
        assert!((t.p_even - 1.0).abs() < 1e-15);

        let s = TwoComponentState::new(bs("00"), 0.5, PI / 2.0).unwrap();
        let t = enumerate_outcomes(&apply_hadamard_all(build_statevector(&s).unwrap()));
        for p in &t.probabilities {
            assert!((p - 0.25).abs() < 1e-15);
        }
        assert!((t.p_even - 0.5).abs() < 1e-15);

        let mix = ClassicalTwoMixture::new(bs("000"), 0.3).unwrap();
        let out = evolve_density(&densify_mixture(&mix).unwrap(), LocalUnitary::HadamardAll).unwrap();
        let t = enumerate_outcomes(&out);
        for p in &t.probabilities {
            assert!((p - 0.125).abs() < 1e-15);
        }
        assert!(cross_check(&analytic_mixture_post_hadamard(&mix), &t).unwrap() < 1e-15);
    }

    #[test]
    fn comparator_is_sensitive() {
        let s = TwoComponentState::new(bs("0101"), 0.3, 1.0).unwrap();
        let t = enumerate_outcomes(&apply_hadamard_all(build_statevector(&s).unwrap()));
        let mut analytic = analytic_post_hadamard(&s);
        assert!(cross_check(&analytic, &t).unwrap() <= 1e-12);
        analytic.p_even += 1e-6;
        // perturbation survives up to floating-point rounding of the sum
        assert!(cross_check(&analytic, &t).unwrap() >= 1e-6 * (1.0 - 1e-9));
        let small = analytic_post_hadamard(&TwoComponentState::new(bs("01"), 0.3, 1.0).unwrap());
        assert!(cross_check(&small, &t).is_err());
    }

    #[test]
    fn butterfly_matches_matrix_product() {
        for n in 1..=7 {
            let amps: Vec<Complex64> = (0..1usize << n)
                .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let sv = StateVector::from_amplitudes(n, amps.into_iter().map(|a| a / norm).collect()).unwrap();
            let fast = apply_hadamard_all(sv.clone());
            let slow = hadamard_by_matrix(&sv).unwrap();
            for (x, y) in fast.amplitudes().iter().zip(slow.amplitudes()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_projector_evolution_matches_vector_evolution() {
        let s = TwoComponentState::new(bs("011"), 0.35, 2.1).unwrap();
        let sv = build_statevector(&s).unwrap();
        let rho = DenseDensityOperator::from_state_vector(&sv).unwrap();
        let u = LocalUnitary::PhaseShift {
            qubit: 2,
            reference_bit: 1,
        };
        let rho = evolve_density(&evolve_density(&rho, u).unwrap(), LocalUnitary::HadamardAll).unwrap();
        let sv = apply_hadamard_all(crate::gates::apply_phase_shift(sv, 2, 1).unwrap());
        let expected = DenseDensityOperator::from_state_vector(&sv).unwrap();
        for (a, b) in rho.matrix().iter().zip(expected.matrix().iter()) {
            assert!((a - b).norm() < 1e-14);
        }
        let diag = rho.diagnostics();
        assert!(diag.is_valid(), "{diag:?}");
    }
}
