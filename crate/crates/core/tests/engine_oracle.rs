mod common;

use common::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;
use rcslab::circuit::{Circuit, CircuitMeta, Cycle, Gate, GateKind};
use rcslab::sim::{sample, Engine, ErrorModel, StateVector};

fn run_from(state: Vec<C64>, circuit: &Circuit) -> StateVector {
    let mut sv = StateVector::from_amplitudes(state).unwrap();
    for g in circuit.gates() {
        sv.apply_gate(g);
    }
    sv
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_dense_oracle(n in 1usize..=6, gates in 0usize..40, seed in any::<u64>()) {
        let mut r = rng(seed);
        let circuit = random_circuit(n, gates, &mut r);
        let engine_state = Engine::default().run(&circuit, None).unwrap().state;
        let u = oracle_unitary(&circuit);
        let dim = 1usize << n;
        let expected: Vec<C64> = (0..dim).map(|i| u[i * dim]).collect();
        prop_assert!(max_diff(engine_state.amplitudes(), &expected) <= 1e-9);
    }

    #[test]
    fn single_gate_on_random_state_matches_matvec(n in 2usize..=6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let psi = random_state(n, &mut r);
        let circuit = random_circuit(n, 1, &mut r);
        let out = run_from(psi.clone(), &circuit);
        let u = oracle_unitary(&circuit);
        let dim = 1usize << n;
        let expected: Vec<C64> = (0..dim).map(|i| (0..dim).map(|j| u[i * dim + j] * psi[j]).sum()).collect();
        prop_assert!(max_diff(out.amplitudes(), &expected) <= 1e-10);
    }
}

#[test]
fn norm_preserved_over_a_thousand_gates() {
    let mut r = rng(7);
    let circuit = random_circuit(10, 1000, &mut r);
    let state = Engine::default().run(&circuit, None).unwrap().state;
    assert!((state.norm_sqr() - 1.0).abs() <= 1e-9);

    let noisy = Engine::default().run(&circuit, Some(&ErrorModel::new(0.2, 3).unwrap())).unwrap();
    assert!(noisy.log.errors_injected > 0);
    assert!((noisy.state.norm_sqr() - 1.0).abs() <= 1e-9);
}

#[test]
fn fsim_identity_leaves_state_unchanged() {
    let mut r = rng(11);
    let psi = random_state(2, &mut r);
    let c = Circuit::new(
        2,
        vec![Cycle::new(vec![Gate::two(GateKind::FSim { theta: 0.0, phi: 0.0 }, 0, 1).unwrap()]).unwrap()],
        CircuitMeta::default(),
    )
    .unwrap();
    assert!(max_diff(run_from(psi.clone(), &c).amplitudes(), &psi) <= 1e-12);
}

/// Upper 0.1% point of chi-squared with 7 degrees of freedom.
const CHI2_7DF_ALPHA_0001: f64 = 24.322;

#[test]
fn sampler_passes_chi_squared_on_eight_states() {
    let distributions: Vec<Vec<f64>> = vec![
        vec![0.125; 8],
        vec![0.4, 0.2, 0.1, 0.1, 0.08, 0.06, 0.04, 0.02],
        vec![0.001, 0.002, 0.003, 0.004, 0.09, 0.2, 0.3, 0.4],
        {
            let mut r = rng(99);
            let w: Vec<f64> = (0..8).map(|_| complex_gaussian(&mut r).norm_sqr()).collect();
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        },
    ];
    let k = 1_000_000;
    for (d, probs) in distributions.iter().enumerate() {
        let mut r = rng(1000 + d as u64);
        let amps: Vec<C64> = probs
            .iter()
            .map(|p| C64::from_polar(p.sqrt(), r.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let state = StateVector::from_amplitudes(amps).unwrap();
        let samples = sample(&state, k, 5 + d as u64).unwrap();
        let mut counts = [0usize; 8];
        for &b in samples.bitstrings() {
            counts[b as usize] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .zip(probs)
            .map(|(&c, &p)| {
                let e = p * k as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        assert!(chi2 < CHI2_7DF_ALPHA_0001, "distribution {d}: chi2 = {chi2}");
    }
}

#[test]
fn probabilities_of_matches_elementwise_lookup() {
    let mut r = rng(4);
    let state = StateVector::from_amplitudes(random_state(4, &mut r)).unwrap();
    let samples = sample(&state, 10, 8).unwrap();
    let batch = state.probabilities_of(&samples).unwrap();
    let single: Vec<f64> = samples.bitstrings().iter().map(|&b| state.probability(b).unwrap()).collect();
    assert_eq!(batch, single);
}

#[test]
fn equal_superposition_frequency() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let state = StateVector::from_amplitudes(vec![C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
    let s = sample(&state, 100_000, 0).unwrap();
    let ones = s.bitstrings().iter().filter(|&&b| b == 1).count() as f64 / 100_000.0;
    assert!((0.494..=0.506).contains(&ones), "{ones}");
}

#[test]
fn expected_error_count_matches_binomial() {
    // 1000 trajectories of a 12-gate circuit on 3 qubits, mean 1.5 targets per gate
    let mut gates = Vec::new();
    for i in 0..6 {
        gates.push(Cycle::new(vec![Gate::single(GateKind::SqrtX, i % 3).unwrap()]).unwrap());
        gates.push(Cycle::new(vec![Gate::two(GateKind::FSim { theta: 1.0, phi: 0.5 }, i % 3, (i + 1) % 3).unwrap()]).unwrap());
    }
    let c = Circuit::new(3, gates, CircuitMeta::default()).unwrap();
    let eps = 0.05;
    let engine = Engine::default();
    let model = ErrorModel::new(eps, 17).unwrap();
    let total: usize = (0..1000).map(|t| engine.run(&c, Some(&model.for_trajectory(t))).unwrap().log.errors_injected).sum();
    let trials = 1000.0 * c.target_count() as f64;
    let mean = eps * trials;
    let sigma = (trials * eps * (1.0 - eps)).sqrt();
    assert!((total as f64 - mean).abs() <= 5.0 * sigma, "{total} vs {mean} ± {sigma}");
}
