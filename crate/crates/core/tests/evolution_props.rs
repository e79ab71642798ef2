mod common;

use std::sync::LazyLock;

use proptest::prelude::*;
use qtm_core::distribution::encode_input;
use qtm_core::evolution::{
    all_well_formed, apply_u, apply_u_adjoint, apply_u_adjoint_with, apply_u_with, evolve,
    evolve_to,
};
use qtm_core::machine::corpus;
use qtm_core::tape::{canonicalize, mark_k};
use qtm_core::{Exec, Machine, Superposition, Symbol};

static MACHINES: LazyLock<Vec<(&'static str, Machine)>> = LazyLock::new(common::corpus_machines);

fn machine_and(support: usize) -> impl Strategy<Value = (usize, Superposition)> {
    (0..MACHINES.len())
        .prop_flat_map(move |i| (Just(i), common::normalized(&MACHINES[i].1, support, 5)))
}

fn machine_and_pair(
    support: usize,
) -> impl Strategy<Value = (usize, Superposition, Superposition)> {
    (0..MACHINES.len()).prop_flat_map(move |i| {
        let m = &MACHINES[i].1;
        (
            Just(i),
            common::superposition(m, support, 5),
            common::superposition(m, support, 5),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evolution_preserves_the_norm((i, phi) in machine_and(16)) {
        let m = &MACHINES[i].1;
        let next = apply_u(m, &phi).unwrap();
        prop_assert!((next.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_preserves_inner_products((i, phi, psi) in machine_and_pair(12)) {
        let m = &MACHINES[i].1;
        let a = apply_u(m, &phi).unwrap().inner(&apply_u(m, &psi).unwrap());
        let b = phi.inner(&psi);
        prop_assert!((a - b).norm() < 1e-12, "{a} vs {b}");
    }

    /// `⟨Uφ, ψ⟩ = ⟨φ, U*ψ⟩`, with both sides computed independently.
    #[test]
    fn adjoint_identity((i, phi, psi) in machine_and_pair(12)) {
        let m = &MACHINES[i].1;
        let lhs = apply_u(m, &phi).unwrap().inner(&psi);
        let rhs = phi.inner(&apply_u_adjoint(m, &psi).unwrap());
        prop_assert!((lhs - rhs).norm() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn adjoint_inverts_evolution((i, phi) in machine_and(16)) {
        let m = &MACHINES[i].1;
        let back = apply_u_adjoint(m, &apply_u(m, &phi).unwrap()).unwrap();
        prop_assert!(back.distance(&phi) < 1e-12);
    }

    /// Well-formed configurations have well-formed images and preimages.
    #[test]
    fn images_stay_well_formed((i, phi) in machine_and(16)) {
        let m = &MACHINES[i].1;
        prop_assert!(all_well_formed(m, &phi).unwrap());
        let next = apply_u(m, &phi).unwrap();
        prop_assert!(all_well_formed(m, &next).unwrap());
        prop_assert!(all_well_formed(m, &apply_u_adjoint(m, &phi).unwrap()).unwrap());
    }

    #[test]
    fn execution_modes_agree((i, phi) in machine_and(64)) {
        let m = &MACHINES[i].1;
        let s = apply_u_with(m, &phi, Exec::Sequential).unwrap();
        let p = apply_u_with(m, &phi, Exec::Parallel).unwrap();
        prop_assert_eq!(&s, &p);
        prop_assert_eq!(
            apply_u_adjoint_with(m, &s, Exec::Sequential).unwrap(),
            apply_u_adjoint_with(m, &s, Exec::Parallel).unwrap()
        );
    }

    /// A final configuration advances one mark per step and is recovered
    /// step by step by the adjoint.
    #[test]
    fn marks_count_the_steps(
        i in 0..3usize,
        l in prop::collection::vec(0u8..3, 0..5),
        r in prop::collection::vec(0u8..3, 0..5),
        k in 1usize..20,
    ) {
        let m = &MACHINES[i].1;
        let c = canonicalize(
            l.into_iter().map(Symbol::new).collect(),
            m.final_state(),
            r.into_iter().map(Symbol::new).collect(),
        );
        let states: Vec<Superposition> = evolve(m, Superposition::basis(c.clone()), k)
            .collect::<Result<_, _>>()
            .unwrap();
        for (j, s) in states.iter().enumerate() {
            prop_assert_eq!(s, &Superposition::basis(mark_k(&c, j, m).unwrap()));
        }
        let mut back = states[k].clone();
        for j in (0..k).rev() {
            back = apply_u_adjoint(m, &back).unwrap();
            prop_assert_eq!(&back, &Superposition::basis(mark_k(&c, j, m).unwrap()));
        }
    }
}

#[test]
fn reference_inputs_keep_unit_norm_for_200_steps() {
    for cm in corpus::build_corpus() {
        let m = cm.machine().unwrap().validate(1e-9).unwrap();
        for input in &cm.inputs {
            let phi0 = encode_input(&m, input).unwrap();
            let mut prev = phi0.clone();
            for (k, phi) in evolve(&m, phi0, 200).enumerate().skip(1) {
                let phi = phi.unwrap();
                assert!(
                    (phi.norm() - 1.0).abs() < 1e-12,
                    "{} step {k}: {}",
                    cm.name,
                    phi.norm()
                );
                assert!(apply_u_adjoint(&m, &phi).unwrap().distance(&prev) < 1e-12);
                prev = phi;
            }
        }
    }
}

#[test]
fn valid_machines_are_isometries_on_small_windows() {
    for (name, m) in MACHINES.iter() {
        let configs = common::window_configurations(m, 5);
        let dev = common::gram_deviation(m, &configs);
        assert!(dev < 1e-12, "{name}: {dev}");
    }
}

#[test]
fn broken_machines_fail_statically_and_dynamically() {
    for (cond, name, text) in corpus::broken_machines() {
        let m = common::machine(text);
        let report = m.check_local_unitarity(1e-9);
        assert!(!report.passes(), "{name}");
        let dev = [report.max_dev_norm, report.max_dev_orth, report.max_dev_sep];
        assert!(dev[cond as usize - 1] > 1e-3, "{name}: {report}");
        let gram = common::gram_deviation(&m, &common::window_configurations(&m, 5));
        assert!(gram > 1e-3, "{name}: {gram}");
    }
}

#[test]
fn successor_output_after_2n_plus_3_steps() {
    let m = &MACHINES[0].1;
    for n in 0..6u64 {
        let phi = evolve_to(
            m,
            &encode_input(m, &[(qtm_core::Amplitude::new(1.0, 0.0), n)]).unwrap(),
            2 * n as usize + 3,
        )
        .unwrap();
        let expect = canonicalize(
            vec![Symbol::ONE],
            m.final_state(),
            vec![Symbol::ONE; n as usize],
        );
        assert_eq!(phi, Superposition::basis(expect));
    }
}
