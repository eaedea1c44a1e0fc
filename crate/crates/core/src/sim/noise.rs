//! Stochastic Pauli error injection.
//!
//! After every gate, each target qubit independently suffers an error with probability `ε`; the
//! error is `X`, `Y` or `Z` with equal probability. One call to [`Engine::run`] with a model is
//! one trajectory.
//!
//! [`Engine::run`]: super::Engine::run

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SimError, StateVector};
use crate::circuit::{Circuit, GateKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn kind(self) -> GateKind {
        match self {
            Pauli::X => GateKind::PauliX,
            Pauli::Y => GateKind::PauliY,
            Pauli::Z => GateKind::PauliZ,
        }
    }
}

/// Per-gate, per-target Pauli error probability with a reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorModel {
    epsilon: f64,
    seed: u64,
    trajectory: u64,
}

impl ErrorModel {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self, SimError> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(SimError::BadEpsilon(epsilon));
        }
        Ok(Self { epsilon, seed, trajectory: 0 })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trajectory(&self) -> u64 {
        self.trajectory
    }

    /// Same model on an independent random stream for trajectory `t`.
    pub fn for_trajectory(self, t: u64) -> Self {
        Self { trajectory: t, ..self }
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.trajectory);
        rng
    }
}

/// A single deterministic error: `pauli` on `qubit` right after cycle `after_cycle`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedError {
    pub after_cycle: usize,
    pub qubit: usize,
    pub pauli: Pauli,
}

/// Errors realized during one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunLog {
    pub errors_injected: usize,
    pub by_pauli: [usize; 3],
}

impl RunLog {
    pub(crate) fn record(&mut self, p: Pauli) {
        self.errors_injected += 1;
        self.by_pauli[p as usize] += 1;
    }
}

pub(crate) fn run_noisy(state: &mut StateVector, circuit: &Circuit, model: &ErrorModel, log: &mut RunLog) {
    let mut rng = model.rng();
    for gate in circuit.gates() {
        state.apply_gate(gate);
        if model.epsilon == 0.0 {
            continue;
        }
        for &q in gate.targets() {
            if rng.random::<f64>() < model.epsilon {
                let p = Pauli::ALL[rng.random_range(0..3)];
                state.apply_pauli(p, q);
                log.record(p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, CircuitMeta, Cycle, Gate};
    use crate::sim::run_circuit;

    fn ladder(n: usize, layers: usize) -> Circuit {
        let mut cycles = Vec::new();
        for l in 0..layers {
            let kind = [GateKind::SqrtX, GateKind::SqrtY, GateKind::SqrtW][l % 3].clone();
            cycles.push(Cycle::new((0..n).map(|q| Gate::single(kind.clone(), q).unwrap()).collect()).unwrap());
            let pairs = (l % 2..n.saturating_sub(1)).step_by(2);
            let fsim = GateKind::FSim { theta: 1.2, phi: 0.5 };
            cycles.push(Cycle::new(pairs.map(|a| Gate::two(fsim.clone(), a, a + 1).unwrap()).collect()).unwrap());
        }
        Circuit::new(n, cycles, CircuitMeta::default()).unwrap()
    }

    #[test]
    fn epsilon_validated() {
        assert!(ErrorModel::new(-0.1, 0).is_err());
        assert!(ErrorModel::new(1.5, 0).is_err());
        assert!(ErrorModel::new(f64::NAN, 0).is_err());
        assert!(ErrorModel::new(1.0, 0).is_ok());
    }

    #[test]
    fn zero_epsilon_is_bit_identical() {
        let c = ladder(5, 4);
        let clean = run_circuit(&c, None).unwrap();
        let noisy = run_circuit(&c, Some(&ErrorModel::new(0.0, 9).unwrap())).unwrap();
        assert_eq!(clean.state.amplitudes(), noisy.state.amplitudes());
        assert_eq!(noisy.log.errors_injected, 0);
    }

    #[test]
    fn forced_insertion_counts_one() {
        let c = Circuit::new(1, vec![Cycle::new(vec![Gate::single(GateKind::SqrtX, 0).unwrap()]).unwrap()], CircuitMeta::default())
            .unwrap();
        let run = run_circuit(&c, Some(&ErrorModel::new(1.0, 4).unwrap())).unwrap();
        assert_eq!(run.log.errors_injected, 1);
        assert!((run.state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn realized_error_rate_matches_binomial() {
        let c = ladder(4, 5);
        let targets = c.target_count();
        let eps = 0.05;
        let runs = 2000;
        let base = ErrorModel::new(eps, 77).unwrap();
        let total: usize = (0..runs)
            .map(|t| {
                let run = run_circuit(&c, Some(&base.for_trajectory(t))).unwrap();
                assert!((run.state.norm_sqr() - 1.0).abs() < 1e-9);
                run.log.errors_injected
            })
            .sum();
        let trials = (runs as usize * targets) as f64;
        let mean = eps * trials;
        let sigma = (trials * eps * (1.0 - eps)).sqrt();
        assert!((total as f64 - mean).abs() <= 5.0 * sigma, "{total} vs {mean} ± {sigma}");
    }

    #[test]
    fn trajectories_differ_but_repeat() {
        let c = ladder(4, 6);
        let m = ErrorModel::new(0.2, 1).unwrap();
        let a = run_circuit(&c, Some(&m.for_trajectory(0))).unwrap();
        let b = run_circuit(&c, Some(&m.for_trajectory(0))).unwrap();
        let d = run_circuit(&c, Some(&m.for_trajectory(1))).unwrap();
        assert_eq!(a.state, b.state);
        assert_ne!(a.state, d.state);
    }
}
