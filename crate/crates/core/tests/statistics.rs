//! Golden-seed statistical checks. Seeds were chosen once, verified against
//! the stated bounds, and are fixed here.

use std::f64::consts::PI;

use mtc_core::gates::{analytic_post_hadamard, apply_hadamard_all};
use mtc_core::measurement::{sample_shots, tally_parity, tally_pattern, DenseSampler, Sampler};
use mtc_core::rng::derive_seed;
use mtc_core::states::{build_statevector, pure_z_distribution, OutcomeDistribution};
use mtc_core::stats::chi_square_homogeneity;
use mtc_core::{BasisString, TwoComponentState};

const GOLDEN_SEED: u64 = 20_240_601;

fn bs(s: &str) -> BasisString {
    s.parse().unwrap()
}

#[test]
fn fair_coin_within_three_sigma() {
    let coin = OutcomeDistribution::new(1, [(bs("0"), 0.5), (bs("1"), 0.5)]).unwrap();
    let shots = 100_000;
    let r = sample_shots(&coin, shots, GOLDEN_SEED, "coin").unwrap();
    let ones = r.shots.iter().filter(|s| s.weight() == 1).count() as f64 / shots as f64;
    let bound = 3.0 * (0.25f64 / shots as f64).sqrt();
    assert!((bound - 0.00474).abs() < 1e-5);
    assert!((ones - 0.5).abs() <= bound, "{ones}");
}

#[test]
fn one_and_eight_workers_replay_identically() {
    let coin = OutcomeDistribution::new(1, [(bs("0"), 0.5), (bs("1"), 0.5)]).unwrap();
    let a = Sampler::new(1).sample(&coin, 100_000, GOLDEN_SEED, "coin").unwrap();
    let b = Sampler::new(8).sample(&coin, 100_000, GOLDEN_SEED, "coin").unwrap();
    assert_eq!(a, b);
}

#[test]
fn constructive_parity_run_excludes_one_half() {
    let s = TwoComponentState::new(bs("000"), 0.5, 0.0).unwrap();
    let sv = apply_hadamard_all(build_statevector(&s).unwrap());
    let r = sample_shots(&DenseSampler::new(&sv).unwrap(), 100_000, GOLDEN_SEED, "h").unwrap();
    let st = tally_parity(&r, 0.01).unwrap();
    assert!(st.ci_low <= 1.0 && 1.0 <= st.ci_high);
    assert!(st.ci_low > 0.5);
}

#[test]
fn weight_estimate_covers_truth() {
    let s = TwoComponentState::new(bs("0110"), 0.3, 1.7).unwrap();
    let r = sample_shots(&pure_z_distribution(&s), 100_000, GOLDEN_SEED, "z").unwrap();
    let st = tally_pattern(&r, s.pattern(), 0.01).unwrap();
    assert_eq!(st.stray_count, 0);
    assert!(st.ci_low.unwrap() <= 0.3 && 0.3 <= st.ci_high.unwrap(), "{st:?}");
}

#[test]
fn wilson_coverage_at_three_quarters() {
    // p = 1/2, φ = π/3 gives p_even = 3/4
    let s = TwoComponentState::new(bs("00"), 0.5, PI / 3.0).unwrap();
    let dist = analytic_post_hadamard(&s);
    assert!((dist.p_even - 0.75).abs() < 1e-15);
    let covered = (0..1000u64)
        .filter(|&rep| {
            let r = sample_shots(&dist, 1000, derive_seed(GOLDEN_SEED, rep), "cov").unwrap();
            let st = tally_parity(&r, 0.05).unwrap();
            st.ci_low <= 0.75 && 0.75 <= st.ci_high
        })
        .count();
    assert!(covered >= 930, "coverage {covered}/1000");
}

#[test]
fn dense_and_analytic_paths_are_exchangeable() {
    for (pattern, p, phi) in [("0101", 0.3, 1.0), ("000", 0.5, 2.4), ("1", 0.8, 4.0)] {
        let s = TwoComponentState::new(bs(pattern), p, phi).unwrap();
        let dense = DenseSampler::new(&apply_hadamard_all(build_statevector(&s).unwrap())).unwrap();
        let a = tally_parity(&sample_shots(&dense, 100_000, GOLDEN_SEED, "dense").unwrap(), 0.01).unwrap();
        let b = tally_parity(
            &sample_shots(&analytic_post_hadamard(&s), 100_000, GOLDEN_SEED + 1, "analytic").unwrap(),
            0.01,
        )
        .unwrap();
        let pv = chi_square_homogeneity(a.even_count, a.total, b.even_count, b.total).unwrap();
        assert!(pv > 0.001, "{pattern}: p-value {pv}");
    }
}
