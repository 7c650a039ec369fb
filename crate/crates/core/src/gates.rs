//! Local operations: Hadamard on every qubit and the single-qubit `e^{iπ/2}`
//! phase shift, as dense kernels and in closed form.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{bit_position, BasisString};
use crate::error::{Error, Result};
use crate::states::{ClassicalTwoMixture, StateVector, TwoComponentState};

/// Below this many amplitudes the kernels stay on the calling thread.
const PAR_THRESHOLD: usize = 1 << 14;
const PAR_CHUNK: usize = 1 << 12;

/// Post-measurement parity statistics. Within each parity sector every basis
/// string carries the same probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityDistribution {
    pub n: usize,
    pub p_even: f64,
    pub p_odd: f64,
    pub per_string_even: f64,
    pub per_string_odd: f64,
}

impl ParityDistribution {
    /// Probability of one particular outcome string.
    pub fn probability(&self, b: BasisString) -> f64 {
        if b.is_even() {
            self.per_string_even
        } else {
            self.per_string_odd
        }
    }

    /// Number of strings in each parity sector, `2^{n-1}`.
    pub fn sector_size(&self) -> f64 {
        2f64.powi(self.n as i32 - 1)
    }
}

/// `2^{-n/2}`, computed without accumulating per-pass rounding.
fn hadamard_scale(n: usize) -> f64 {
    let s = 0.5f64.powi((n / 2) as i32);
    if n % 2 == 1 {
        s * FRAC_1_SQRT_2
    } else {
        s
    }
}

fn butterfly_blocks(chunk: &mut [Complex64], stride: usize) {
    for block in chunk.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x + y;
            *b = x - y;
        }
    }
}

/// In-place `H^{⊗n}` on a slice of `2^n` amplitudes: one butterfly pass per
/// qubit, then a single `2^{-n/2}` scale. Output does not depend on the
/// number of rayon workers.
pub fn hadamard_all_in_place(amps: &mut [Complex64]) {
    let len = amps.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let n = len.trailing_zeros() as usize;
    let mut stride = 1;
    while stride < len {
        if len >= PAR_THRESHOLD {
            let chunk = PAR_CHUNK.max(2 * stride);
            amps.par_chunks_mut(chunk).for_each(|c| butterfly_blocks(c, stride));
        } else {
            butterfly_blocks(amps, stride);
        }
        stride <<= 1;
    }
    let scale = hadamard_scale(n);
    if len >= PAR_THRESHOLD {
        amps.par_iter_mut().for_each(|a| *a *= scale);
    } else {
        amps.iter_mut().for_each(|a| *a *= scale);
    }
}

/// In-place phase shift: amplitudes whose bit at `qubit` differs from
/// `reference_bit` are multiplied by `i`.
pub fn phase_shift_in_place(amps: &mut [Complex64], qubit: usize, reference_bit: u8) -> Result<()> {
    let len = amps.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let n = len.trailing_zeros() as usize;
    let pos = bit_position(n, qubit)?;
    if reference_bit > 1 {
        return Err(Error::InvalidArgument(format!(
            "reference bit must be 0 or 1, got {reference_bit}"
        )));
    }
    let shift = |(k, a): (usize, &mut Complex64)| {
        if ((k >> pos) & 1) as u8 != reference_bit {
            // multiply by i exactly
            *a = Complex64::new(-a.im, a.re);
        }
    };
    if len >= PAR_THRESHOLD {
        amps.par_iter_mut().enumerate().for_each(shift);
    } else {
        amps.iter_mut().enumerate().for_each(shift);
    }
    Ok(())
}

pub fn apply_hadamard_all(mut sv: StateVector) -> StateVector {
    hadamard_all_in_place(sv.amplitudes_mut());
    sv
}

pub fn apply_phase_shift(mut sv: StateVector, qubit: usize, reference_bit: u8) -> Result<StateVector> {
    phase_shift_in_place(sv.amplitudes_mut(), qubit, reference_bit)?;
    Ok(sv)
}

/// `p_even = 1/2 + √(p(1−p)) cos φ`.
pub(crate) fn eq_p_even(p: f64, phi: f64) -> f64 {
    0.5 + (p * (1.0 - p)).sqrt() * phi.cos()
}

/// Sector weights for a two-branch state measured in a basis where the two
/// branches overlap every even outcome with relative sign `+1` and every odd
/// outcome with relative sign `-1`.
fn sector_distribution(n: usize, state: &TwoComponentState) -> ParityDistribution {
    let (a, b) = state.branch_amplitudes();
    let dim = 2f64.powi(n as i32);
    let p_even = eq_p_even(state.p(), state.phi());
    ParityDistribution {
        n,
        p_even,
        p_odd: 1.0 - p_even,
        per_string_even: (a + b).norm_sqr() / dim,
        per_string_odd: (a - b).norm_sqr() / dim,
    }
}

/// Parity statistics after `H^{⊗n}` followed by a z measurement. Independent
/// of the state's pattern.
pub fn analytic_post_hadamard(state: &TwoComponentState) -> ParityDistribution {
    // H^{⊗n}|i⟩ = 2^{-n/2} Σ_x (-1)^{x·i} |x⟩ and x·ī = |x| - x·i, so the two
    // branches interfere with sign (-1)^{|x|}.
    sector_distribution(state.n(), state)
}

/// Parity statistics of the mixture after `H^{⊗n}`: uniform over all strings.
pub fn analytic_mixture_post_hadamard(mix: &ClassicalTwoMixture) -> ParityDistribution {
    let n = mix.n();
    let per = 0.5f64.powi(n as i32);
    ParityDistribution {
        n,
        p_even: 0.5,
        p_odd: 0.5,
        per_string_even: per,
        per_string_odd: per,
    }
}

/// Distribution of `|−⟩`-count parity when every qubit is measured in the
/// x basis directly.
pub fn x_basis_distribution(state: &TwoComponentState) -> ParityDistribution {
    // ⟨s_x|i⟩ = 2^{-n/2} (-1)^{s·i}; the complement branch picks up an extra
    // (-1)^{|s|}, the same interference pattern as Hadamard-then-z.
    sector_distribution(state.n(), state)
}
