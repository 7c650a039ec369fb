//! Oracle cross-checks and golden-seed statistical checks, runnable from the
//! installed binary.

use std::f64::consts::{FRAC_PI_2, TAU};

use mtc_core::gates::{analytic_post_hadamard, apply_hadamard_all, apply_phase_shift, x_basis_distribution};
use mtc_core::measurement::sample_shots;
use mtc_core::oracle::{cross_check, densify_mixture, enumerate_outcomes, evolve_density, LocalUnitary};
use mtc_core::protocol::{analytic_p_even_shifted, invert_phase, run_discrimination, Backend, RunShots, Verdict};
use mtc_core::states::{build_statevector, circular_difference, ClassicalTwoMixture, OutcomeDistribution};
use mtc_core::{BasisString, ParityDistribution, Preparation, ProtocolConfig, TwoComponentState};

pub const ORACLE_TOLERANCE: f64 = 1e-12;
pub const GOLDEN_SEED: u64 = 20_240_601;

const WEIGHTS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestSummary {
    pub checks: Vec<CheckResult>,
}

impl SelftestSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<24} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }
}

fn phases() -> impl Iterator<Item = f64> {
    (0..13).map(|k| TAU * k as f64 / 12.0)
}

fn deviation_check(name: &'static str, dev: f64) -> CheckResult {
    CheckResult {
        name,
        passed: dev <= ORACLE_TOLERANCE,
        detail: format!("max deviation {dev:.3e}"),
    }
}

fn perturbed(mut d: ParityDistribution, fault: f64) -> ParityDistribution {
    d.p_even += fault;
    d
}

/// Run every check. `fault` is added to each closed-form `p_even` before
/// comparison; nonzero values must make the suite fail.
pub fn run(fault: f64) -> SelftestSummary {
    let mut checks = Vec::new();

    let mut dev = 0.0f64;
    for n in 1..=8 {
        for &p in &WEIGHTS {
            for phi in phases() {
                let s = TwoComponentState::new(BasisString::zeros(n).expect("n in range"), p, phi).expect("valid");
                let table = enumerate_outcomes(&apply_hadamard_all(build_statevector(&s).expect("dense")));
                dev = dev.max(cross_check(&perturbed(analytic_post_hadamard(&s), fault), &table).expect("same n"));
            }
        }
    }
    checks.push(deviation_check("parity-formula-oracle", dev));

    let mut dev = 0.0f64;
    for n in 1..=6usize {
        for bits in 0..(1u64 << n) {
            let pattern = BasisString::new(n, bits).expect("fits");
            let s = TwoComponentState::new(pattern, 0.3, 1.0).expect("valid");
            let table = enumerate_outcomes(&apply_hadamard_all(build_statevector(&s).expect("dense")));
            dev = dev.max(cross_check(&perturbed(analytic_post_hadamard(&s), fault), &table).expect("same n"));
        }
    }
    checks.push(deviation_check("pattern-independence", dev));

    let mut dev = 0.0f64;
    for n in 1..=6 {
        for &p in &WEIGHTS {
            for phi in phases() {
                let s = TwoComponentState::new(BasisString::new(n, 1).expect("fits"), p, phi).expect("valid");
                let q = 1;
                let bit = s.pattern().bit(q).expect("in range");
                let sv = apply_phase_shift(build_statevector(&s).expect("dense"), q, bit).expect("in range");
                let table = enumerate_outcomes(&apply_hadamard_all(sv));
                let expected = analytic_p_even_shifted(p, phi).expect("valid") + fault;
                dev = dev.max((table.p_even - expected).abs());
            }
        }
    }
    checks.push(deviation_check("shifted-parity-oracle", dev));

    let mut dev = 0.0f64;
    for n in 1..=6 {
        let mix = ClassicalTwoMixture::new(BasisString::new(n, 1).expect("fits"), 0.3).expect("valid");
        let rho = densify_mixture(&mix).expect("within cap");
        let h = evolve_density(&rho, LocalUnitary::HadamardAll).expect("valid");
        let analytic = perturbed(mtc_core::gates::analytic_mixture_post_hadamard(&mix), fault);
        dev = dev.max(cross_check(&analytic, &enumerate_outcomes(&h)).expect("same n"));
        let shifted = evolve_density(
            &rho,
            LocalUnitary::PhaseShift {
                qubit: 1,
                reference_bit: mix.pattern().bit(1).expect("in range"),
            },
        )
        .expect("valid");
        let h = evolve_density(&shifted, LocalUnitary::HadamardAll).expect("valid");
        dev = dev.max(cross_check(&analytic, &enumerate_outcomes(&h)).expect("same n"));
    }
    checks.push(deviation_check("mixture-flatness", dev));

    let mut identical = true;
    for n in 1..=8 {
        for &p in &WEIGHTS {
            for phi in phases() {
                let s = TwoComponentState::new(BasisString::zeros(n).expect("fits"), p, phi).expect("valid");
                identical &= x_basis_distribution(&s) == perturbed(analytic_post_hadamard(&s), fault);
            }
        }
    }
    checks.push(CheckResult {
        name: "x-basis-equivalence",
        passed: identical,
        detail: if identical {
            "bit-identical".into()
        } else {
            "mismatch".into()
        },
    });

    let mut dev = 0.0f64;
    for &p in &WEIGHTS {
        for phi in phases() {
            let s = TwoComponentState::new(BasisString::zeros(1).expect("fits"), p, phi).expect("valid");
            let (p, e, sh) = Preparation::Pure(s).exact_probabilities();
            match invert_phase(p, (e + fault).clamp(0.0, 1.0), sh) {
                Ok(back) => dev = dev.max(circular_difference(back, phi).abs()),
                Err(_) => dev = f64::INFINITY,
            }
        }
    }
    checks.push(CheckResult {
        name: "phase-round-trip",
        passed: dev <= 1e-9,
        detail: format!("max error {dev:.3e} rad"),
    });

    let coin = OutcomeDistribution::new(1, [("0".parse().expect("bit"), 0.5), ("1".parse().expect("bit"), 0.5)])
        .expect("valid");
    let shots = 100_000;
    let detail;
    let passed = match sample_shots(&coin, shots, GOLDEN_SEED, "selftest") {
        Ok(r) => {
            let ones = r.shots.iter().filter(|s| s.weight() == 1).count() as f64 / shots as f64;
            let bound = 3.0 * (0.25 / shots as f64).sqrt();
            detail = format!("fraction of ones {ones:.5}, bound ±{bound:.5}");
            (ones - 0.5).abs() <= bound
        }
        Err(e) => {
            detail = e.to_string();
            false
        }
    };
    checks.push(CheckResult {
        name: "golden-sampling",
        passed,
        detail,
    });

    let config = ProtocolConfig {
        shots: RunShots::equal(100_000),
        seed: GOLDEN_SEED,
        backend: Backend::Analytic,
        ..Default::default()
    };
    let cases = [
        (
            Preparation::Pure(TwoComponentState::new("0000".parse().expect("bits"), 0.5, FRAC_PI_2).expect("valid")),
            Verdict::Entangled,
        ),
        (
            Preparation::Mixture(ClassicalTwoMixture::new("000".parse().expect("bits"), 0.3).expect("valid")),
            Verdict::ConsistentWithMixture,
        ),
    ];
    let mut correct = 0;
    for (prep, expected) in &cases {
        if run_discrimination(prep, &config).map(|d| d.decision.verdict).ok() == Some(*expected) {
            correct += 1;
        }
    }
    checks.push(CheckResult {
        name: "golden-discrimination",
        passed: correct == cases.len(),
        detail: format!("{correct}/{} verdicts correct", cases.len()),
    });

    SelftestSummary { checks }
}
