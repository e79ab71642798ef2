mod common;

use std::sync::LazyLock;

use proptest::prelude::*;
use qtm_core::distribution::{
    computed_output, encode_input, ppd_of, OutputStatus, Ppd, DEFAULT_SETTLE_EPS,
};
use qtm_core::evolution::{apply_u, evolve, final_part};
use qtm_core::machine::corpus;
use qtm_core::{Amplitude, Machine, Superposition};

static MACHINES: LazyLock<Vec<(&'static str, Machine)>> = LazyLock::new(common::corpus_machines);

fn one() -> Amplitude {
    Amplitude::new(1.0, 0.0)
}

fn trajectory(m: &Machine, phi0: Superposition, k: usize) -> Vec<Ppd> {
    evolve(m, phi0, k).map(|s| ppd_of(m, &s.unwrap())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Output distributions only grow, from any normalized start.
    #[test]
    fn distributions_grow_pointwise(
        (i, phi) in (0..3usize).prop_flat_map(|i| (Just(i), common::normalized(&MACHINES[i].1, 8, 4)))
    ) {
        let m = &MACHINES[i].1;
        let ppds = trajectory(m, phi, 30);
        for w in ppds.windows(2) {
            prop_assert!(w[0].leq(&w[1]));
            prop_assert!(w[1].total() <= 1.0 + 1e-12);
        }
    }

    /// The final part of a superposition evolves into a final superposition
    /// with the same distribution.
    #[test]
    fn final_part_keeps_its_distribution(
        (i, phi) in (0..3usize).prop_flat_map(|i| (Just(i), common::superposition(&MACHINES[i].1, 8, 4)))
    ) {
        let m = &MACHINES[i].1;
        let f = final_part(m, &phi);
        let next = apply_u(m, &f).unwrap();
        prop_assert!(final_part(m, &next).distance(&next) == 0.0);
        prop_assert!(ppd_of(m, &next).max_abs_diff(&ppd_of(m, &f)) < 1e-12);
    }
}

#[test]
fn reference_inputs_are_monotone_for_200_steps() {
    for (name, m) in MACHINES.iter() {
        let cm = corpus::build_corpus()
            .into_iter()
            .find(|c| c.name == *name)
            .unwrap();
        for input in &cm.inputs {
            let ppds = trajectory(m, encode_input(m, input).unwrap(), 200);
            for i in 0..ppds.len() {
                for j in i + 1..ppds.len() {
                    assert!(ppds[i].leq(&ppds[j]), "{name} {i} {j}");
                }
            }
        }
    }
}

#[test]
fn finitary_output_is_stable() {
    let m = &MACHINES[0].1;
    for n in 0..6u64 {
        let phi0 = encode_input(m, &[(one(), n)]).unwrap();
        let (p, status) = computed_output(m, &phi0, 200, DEFAULT_SETTLE_EPS).unwrap();
        let k = 2 * n as usize + 3;
        assert_eq!(status, OutputStatus::Finitary(k));
        assert_eq!(p, Ppd::from_masses([(n + 1, 1.0)]));
        let ppds = trajectory(m, phi0, k + 40);
        for q in &ppds[k..] {
            assert!(q.max_abs_diff(&p) < 1e-15);
        }
        for q in &ppds[..k] {
            assert!(q.is_empty());
        }
    }
}

/// The limit machine splits off half of the surviving mass at every step
/// from the third on, so the missing mass after step `t ≥ 2` is `2^(2-t)`.
#[test]
fn limit_machine_residual_halves_each_step() {
    let m = &MACHINES[2].1;
    for n in 0..=10u64 {
        let ppds = trajectory(m, encode_input(m, &[(one(), n)]).unwrap(), 22);
        for (t, p) in ppds.iter().enumerate() {
            let expect = if t < 2 { 1.0 } else { 2f64.powi(2 - t as i32) };
            assert!((p.bottom() - expect).abs() < 1e-12, "n={n} t={t}");
            assert!((p.get(n + 1) - (1.0 - expect)).abs() < 1e-12);
            assert!(p.len() <= 1);
        }
    }
}

#[test]
fn limit_machine_converges_within_budget() {
    let m = &MACHINES[2].1;
    let phi0 = encode_input(m, &[(one(), 3)]).unwrap();
    match computed_output(m, &phi0, 100, DEFAULT_SETTLE_EPS).unwrap() {
        (p, OutputStatus::ConvergedEstimate(r)) => {
            assert!((r - 2f64.powi(-98)).abs() < 1e-40);
            assert!((p.get(4) - 1.0).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        computed_output(m, &phi0, 49, DEFAULT_SETTLE_EPS).unwrap().1,
        OutputStatus::BudgetExhausted(_)
    ));
}

#[test]
fn coin_splits_evenly() {
    let m = &MACHINES[1].1;
    let phi0 = encode_input(m, &corpus::coin_input()).unwrap();
    let (p, status) = computed_output(m, &phi0, 200, DEFAULT_SETTLE_EPS).unwrap();
    assert!(matches!(status, OutputStatus::ConvergedEstimate(r) if (r - 0.5).abs() < 1e-12));
    assert!((p.get(2) - 0.5).abs() < 1e-12);
    assert_eq!(p.len(), 1);
    assert!((p.bottom() - 0.5).abs() < 1e-12);
}
