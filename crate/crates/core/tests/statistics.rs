//! Statistical behaviour of the sampled pipeline over many seeds.

use std::f64::consts::PI;

use qsd_core::certify::{certify_counts, mdi_probe};
use qsd_core::discriminate::all_index_tuples;
use qsd_core::discriminate::{discriminate_single, DecisionOptions, Ensemble, P2Table};
use qsd_core::netsim::{p1_exact, p2_exact, sample, DeviceStrategy, NQubitNetwork};
use qsd_core::qcore::{basis_state, pauli_expectation, DensityMatrix, PureStateParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[test]
fn honest_sampled_certification_passes_at_fixed_tolerance() {
    let p1 = p1_exact(&DeviceStrategy::honest()).unwrap();
    let passed = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            certify_counts(&sample(&p1, 1_000_000, seed).unwrap(), Some(0.05))
                .unwrap()
                .passed
        })
        .count();
    assert!(passed >= 99, "{passed}/100");
}

#[test]
fn default_tolerance_separates_honest_from_noisy_devices() {
    let honest = p1_exact(&DeviceStrategy::honest()).unwrap();
    let noisy = p1_exact(&DeviceStrategy::werner(0.9).unwrap()).unwrap();
    let honest_pass = (0..50u64)
        .filter(|&s| {
            certify_counts(&sample(&honest, 100_000, s).unwrap(), None)
                .unwrap()
                .passed
        })
        .count();
    let noisy_pass = (0..50u64)
        .filter(|&s| {
            certify_counts(&sample(&noisy, 100_000, s).unwrap(), None)
                .unwrap()
                .passed
        })
        .count();
    assert!(honest_pass >= 49, "{honest_pass}/50");
    assert_eq!(noisy_pass, 0);
}

#[test]
fn sampled_probe_recovers_sign() {
    assert_eq!(
        mdi_probe(&DeviceStrategy::honest(), Some(10_000), 3)
            .unwrap()
            .sign,
        1
    );
    assert_eq!(
        mdi_probe(&DeviceStrategy::conjugated(), Some(10_000), 3)
            .unwrap()
            .sign,
        -1
    );
}

#[test]
fn well_separated_ensembles_are_decided_at_finite_shots() {
    let honest = DeviceStrategy::honest();
    let p1 = p1_exact(&honest).unwrap();
    let c = PureStateParams::new(PI / 8.0, PI / 2.0).unwrap().density();
    let ensemble = Ensemble::uniform(vec![basis_state(0), c]).unwrap();
    assert!(
        qsd_core::discriminate::distance(ensemble.state(0).unwrap(), ensemble.state(1).unwrap())
            .unwrap()
            >= 0.1
    );
    let correct = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let truth = (seed % 2) as usize;
            let cert = certify_counts(&sample(&p1, 100_000, seed).unwrap(), None).unwrap();
            let exact = p2_exact(&honest, ensemble.state(truth).unwrap()).unwrap();
            let observed =
                P2Table::from_counts(&sample(&exact, 100_000, seed + 500).unwrap()).unwrap();
            discriminate_single(
                &observed,
                &ensemble,
                &cert,
                None,
                &DecisionOptions::default(),
            )
            .is_ok_and(|d| d.chosen_index == truth)
        })
        .count();
    assert!(correct >= 99, "{correct}/100");
}

#[test]
fn sampled_coefficients_converge() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let network = NQubitNetwork::honest(2).unwrap();
    let rho = DensityMatrix::random_pure(2, &mut rng);
    let exact = network.p2_exact(&rho).unwrap();
    let observed = P2Table::from_counts(&sample(&exact, 1_000_000, 9).unwrap()).unwrap();
    for m in all_index_tuples(2) {
        let err =
            (observed.coefficient(&m).unwrap() - pauli_expectation(rho.op(), &m).unwrap()).abs();
        assert!(err < 5e-3, "{m:?}: {err}");
    }
}

#[test]
fn close_states_are_refused_rather_than_guessed() {
    let honest = DeviceStrategy::honest();
    let cert =
        certify_counts(&sample(&p1_exact(&honest).unwrap(), 1000, 0).unwrap(), None).unwrap();
    let a = PureStateParams::new(0.5, 0.0).unwrap().density();
    let b = PureStateParams::new(0.5005, 0.0).unwrap().density();
    let ensemble = Ensemble::uniform(vec![a.clone(), b]).unwrap();
    let observed =
        P2Table::from_counts(&sample(&p2_exact(&honest, &a).unwrap(), 1000, 1).unwrap()).unwrap();
    let r = discriminate_single(
        &observed,
        &ensemble,
        &cert,
        None,
        &DecisionOptions::default(),
    );
    assert!(
        matches!(r, Err(qsd_core::Error::Inconclusive { .. })),
        "{r:?}"
    );
}
