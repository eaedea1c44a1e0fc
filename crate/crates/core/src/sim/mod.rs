//! Dense state-vector simulation.
//!
//! A [`StateVector`] holds `2^n` double-precision amplitudes; basis index `i` encodes the
//! bitstring with qubit `q` at bit `q` of `i`.

pub mod dump;
mod kernels;
pub mod noise;
pub mod sample;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateMatrix};

pub use noise::{ErrorModel, FixedError, Pauli, RunLog};
pub use sample::{sample, SampleSet};

/// Default largest simulable qubit count (16 GiB of amplitudes at n = 30).
pub const DEFAULT_MAX_QUBITS: usize = 30;

const AMP_BYTES: u128 = std::mem::size_of::<C64>() as u128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{n} qubits exceed the capacity cap of {cap}: the state vector needs {} ({required_bytes} bytes)", human_bytes(*.required_bytes))]
    Capacity { n: usize, cap: usize, required_bytes: u128 },
    #[error("could not allocate {} for {n} qubits", human_bytes(*.required_bytes))]
    Allocation { n: usize, required_bytes: u128 },
    #[error("a state needs at least one qubit")]
    NoQubits,
    #[error("bitstring {bitstring} does not fit in {n} qubits")]
    BitstringOutOfRange { bitstring: u64, n: usize },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("error probability {0} is outside [0, 1]")]
    BadEpsilon(f64),
    #[error("fixed error placement ({after_cycle}, {qubit}) is outside the circuit")]
    BadPlacement { after_cycle: usize, qubit: usize },
    #[error("state dump: {0}")]
    Dump(String),
}

/// Bytes needed for the amplitudes of an `n`-qubit state.
pub fn state_bytes(n: usize) -> u128 {
    AMP_BYTES << n.min(120)
}

pub(crate) fn human_bytes(bytes: u128) -> String {
    const GIB: f64 = (1u64 << 30) as f64;
    const MIB: f64 = (1u64 << 20) as f64;
    let b = bytes as f64;
    if b >= GIB {
        format!("{:.1} GiB", b / GIB)
    } else if b >= MIB {
        format!("{:.1} MiB", b / MIB)
    } else {
        format!("{bytes} B")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps raw amplitudes; the length must be a power of two `≥ 2`.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self, SimError> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(SimError::NoQubits);
        }
        Ok(Self { n: amps.len().trailing_zeros() as usize, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, bitstring: u64) -> Result<C64, SimError> {
        self.check(bitstring)?;
        Ok(self.amps[bitstring as usize])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(C64::norm_sqr).sum()
    }

    /// `|⟨x|ψ⟩|²`.
    pub fn probability(&self, bitstring: u64) -> Result<f64, SimError> {
        Ok(self.amplitude(bitstring)?.norm_sqr())
    }

    /// Ideal probability of each sampled bitstring, in sample order.
    pub fn probabilities_of(&self, samples: &SampleSet) -> Result<Vec<f64>, SimError> {
        samples.bitstrings().iter().map(|&x| self.probability(x)).collect()
    }

    /// The full distribution `{|amp|²}`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(C64::norm_sqr).collect()
    }

    /// Applies `gate` in place; targets must be `< n`.
    pub fn apply_gate(&mut self, gate: &Gate) {
        let parallel = self.n >= kernels::PAR_MIN_QUBITS;
        self.apply_gate_with(gate, parallel);
    }

    pub(crate) fn apply_gate_with(&mut self, gate: &Gate, parallel: bool) {
        let t = gate.targets();
        assert!(t.iter().all(|&q| q < self.n), "gate target outside {}-qubit state", self.n);
        match gate.matrix() {
            GateMatrix::One(m) => kernels::apply_1q(&mut self.amps, t[0], &m, parallel),
            GateMatrix::Two(m) => kernels::apply_2q(&mut self.amps, t[0], t[1], &m, parallel),
        }
    }

    pub(crate) fn apply_pauli(&mut self, pauli: Pauli, q: usize) {
        let gate = Gate::single(pauli.kind(), q).expect("single-qubit Pauli");
        self.apply_gate(&gate);
    }

    fn check(&self, bitstring: u64) -> Result<(), SimError> {
        if (bitstring as u128) < (1u128 << self.n) {
            Ok(())
        } else {
            Err(SimError::BitstringOutOfRange { bitstring, n: self.n })
        }
    }
}

/// Simulation entry point carrying the capacity cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Engine {
    max_qubits: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Self { max_qubits: DEFAULT_MAX_QUBITS }
    }
}

/// Result of one circuit execution.
#[derive(Clone, Debug)]
pub struct SimRun {
    pub state: StateVector,
    pub log: RunLog,
}

impl Engine {
    pub fn new(max_qubits: usize) -> Self {
        Self { max_qubits }
    }

    pub fn max_qubits(&self) -> usize {
        self.max_qubits
    }

    /// `|0…0⟩` on `n` qubits.
    pub fn init_state(&self, n: usize) -> Result<StateVector, SimError> {
        if n == 0 {
            return Err(SimError::NoQubits);
        }
        let required_bytes = state_bytes(n);
        if n > self.max_qubits || n >= usize::BITS as usize {
            return Err(SimError::Capacity { n, cap: self.max_qubits, required_bytes });
        }
        let dim = 1usize << n;
        let mut amps = Vec::new();
        amps.try_reserve_exact(dim).map_err(|_| SimError::Allocation { n, required_bytes })?;
        amps.resize(dim, C64::new(0.0, 0.0));
        amps[0] = C64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Applies every cycle in order, injecting Pauli errors when a model is given.
    pub fn run(&self, circuit: &Circuit, error_model: Option<&ErrorModel>) -> Result<SimRun, SimError> {
        let mut state = self.init_state(circuit.n())?;
        let mut log = RunLog::default();
        match error_model {
            None => {
                for gate in circuit.gates() {
                    state.apply_gate(gate);
                }
            }
            Some(model) => noise::run_noisy(&mut state, circuit, model, &mut log),
        }
        Ok(SimRun { state, log })
    }

    /// Noiseless run with exactly one Pauli inserted at a fixed location.
    pub fn run_with_fixed_error(&self, circuit: &Circuit, error: FixedError) -> Result<SimRun, SimError> {
        if error.after_cycle >= circuit.cycles().len() || error.qubit >= circuit.n() {
            return Err(SimError::BadPlacement { after_cycle: error.after_cycle, qubit: error.qubit });
        }
        let mut state = self.init_state(circuit.n())?;
        for (i, cycle) in circuit.cycles().iter().enumerate() {
            for gate in cycle.gates() {
                state.apply_gate(gate);
            }
            if i == error.after_cycle {
                state.apply_pauli(error.pauli, error.qubit);
            }
        }
        let mut log = RunLog::default();
        log.record(error.pauli);
        Ok(SimRun { state, log })
    }
}

/// `|0…0⟩` with the default cap.
pub fn init_state(n: usize) -> Result<StateVector, SimError> {
    Engine::default().init_state(n)
}

/// Runs `circuit` from `|0…0⟩` with the default cap.
pub fn run_circuit(circuit: &Circuit, error_model: Option<&ErrorModel>) -> Result<SimRun, SimError> {
    Engine::default().run(circuit, error_model)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::circuit::{cx_matrix, u3_matrix, Cycle, CircuitMeta, GateKind};

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<C64> =
            (0..1usize << n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let norm = amps.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(amps).unwrap()
    }

    /// Embedded gate matrix built element by element from the bit pattern of row and column.
    fn embedded(n: usize, gate: &Gate) -> Vec<Vec<C64>> {
        let dim = 1usize << n;
        let t = gate.targets();
        let mask: usize = t.iter().map(|&q| 1usize << q).sum();
        let local = |i: usize| t.iter().fold(0, |acc, &q| (acc << 1) | ((i >> q) & 1));
        let m = gate.matrix();
        let elem = |r: usize, c: usize| match &m {
            GateMatrix::One(g) => g[r][c],
            GateMatrix::Two(g) => g[r][c],
        };
        (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| if r & !mask == c & !mask { elem(local(r), local(c)) } else { C64::new(0.0, 0.0) })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn init_state_basics() {
        let s = init_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let s = init_state(3).unwrap();
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(s.probability(0).unwrap(), 1.0);
        assert_eq!(init_state(0), Err(SimError::NoQubits));
    }

    #[test]
    fn capacity_error_reports_requirement() {
        let err = init_state(31).unwrap_err();
        // 2^31 amplitudes × 16 bytes
        assert_eq!(err, SimError::Capacity { n: 31, cap: 30, required_bytes: 34_359_738_368 });
        assert!(err.to_string().contains("32.0 GiB"), "{err}");
        assert!(Engine::new(4).init_state(5).is_err());
    }

    #[test]
    fn sqrt_x_twice_flips() {
        let mut s = init_state(1).unwrap();
        let g = Gate::single(GateKind::SqrtX, 0).unwrap();
        s.apply_gate(&g);
        s.apply_gate(&g);
        assert!(s.amplitudes()[0].norm() <= 1e-12);
        assert!((s.amplitudes()[1].norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn fsim_zero_leaves_state() {
        let mut s = random_state(2, 3);
        let before = s.clone();
        s.apply_gate(&Gate::two(GateKind::FSim { theta: 0.0, phi: 0.0 }, 0, 1).unwrap());
        assert!(crate::circuit::matrix::max_abs_diff(s.amplitudes(), before.amplitudes()) <= 1e-12);
    }

    #[test]
    fn kernels_match_dense_oracle() {
        let n = 6;
        let gates = [
            Gate::single(GateKind::SqrtW, 0).unwrap(),
            Gate::single(GateKind::SqrtY, 5).unwrap(),
            Gate::single(GateKind::Generic1Q(u3_matrix(0.7, -0.2, 1.9)), 3).unwrap(),
            Gate::two(GateKind::FSim { theta: 1.1, phi: 0.4 }, 4, 1).unwrap(),
            Gate::two(GateKind::Generic2Q(cx_matrix()), 2, 5).unwrap(),
            Gate::two(GateKind::Generic2Q(cx_matrix()), 5, 0).unwrap(),
        ];
        for (i, gate) in gates.iter().enumerate() {
            let mut s = random_state(n, i as u64);
            let dense = embedded(n, gate);
            let want: Vec<C64> =
                dense.iter().map(|row| row.iter().zip(s.amplitudes()).map(|(a, b)| a * b).sum()).collect();
            s.apply_gate(gate);
            let diff = crate::circuit::matrix::max_abs_diff(s.amplitudes(), &want);
            assert!(diff <= 1e-10, "gate {i}: {diff}");
            assert!((s.norm_sqr() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn parallel_kernels_are_bit_identical() {
        let n = 16;
        let gates = [
            Gate::single(GateKind::SqrtX, 0).unwrap(),
            Gate::single(GateKind::SqrtW, 15).unwrap(),
            Gate::single(GateKind::SqrtY, 11).unwrap(),
            Gate::two(GateKind::FSim { theta: 0.9, phi: 0.3 }, 0, 1).unwrap(),
            Gate::two(GateKind::FSim { theta: 0.9, phi: 0.3 }, 15, 14).unwrap(),
            Gate::two(GateKind::Generic2Q(cx_matrix()), 2, 13).unwrap(),
            Gate::two(GateKind::Generic2Q(cx_matrix()), 14, 3).unwrap(),
        ];
        let mut a = random_state(n, 11);
        let mut b = a.clone();
        for g in &gates {
            a.apply_gate_with(g, false);
            b.apply_gate_with(g, true);
        }
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn probability_queries() {
        let s = init_state(2).unwrap();
        assert_eq!(s.probability(0).unwrap(), 1.0);
        assert_eq!(s.probability(3).unwrap(), 0.0);
        assert!(matches!(s.probability(4), Err(SimError::BitstringOutOfRange { .. })));

        // Bell state: H on q0, then CX with control q0, target q1
        let h = [[C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)], [
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(-FRAC_1_SQRT_2, 0.0),
        ]];
        let c = Circuit::new(
            2,
            vec![
                Cycle::new(vec![Gate::single(GateKind::Generic1Q(h), 0).unwrap()]).unwrap(),
                Cycle::new(vec![Gate::two(GateKind::Generic2Q(cx_matrix()), 0, 1).unwrap()]).unwrap(),
            ],
            CircuitMeta::default(),
        )
        .unwrap();
        let s = run_circuit(&c, None).unwrap().state;
        assert!((s.probability(0).unwrap() - 0.5).abs() <= 1e-12);
        assert!((s.probability(3).unwrap() - 0.5).abs() <= 1e-12);
        assert!(s.probability(1).unwrap() <= 1e-24);
    }

    #[test]
    fn probabilities_of_matches_pointwise() {
        let s = random_state(4, 5);
        let samples = sample(&s, 10, 9).unwrap();
        let probs = s.probabilities_of(&samples).unwrap();
        for (p, &x) in probs.iter().zip(samples.bitstrings()) {
            assert_eq!(*p, s.probability(x).unwrap());
        }
        let empty = SampleSet::from_bitstrings(4, 0, vec![]).unwrap();
        assert!(s.probabilities_of(&empty).unwrap().is_empty());
        let zeros = sample(&init_state(4).unwrap(), 5, 0).unwrap();
        assert_eq!(init_state(4).unwrap().probabilities_of(&zeros).unwrap(), vec![1.0; 5]);
    }

    #[test]
    fn empty_circuit_leaves_init_state() {
        let s = run_circuit(&Circuit::empty(2), None).unwrap().state;
        assert_eq!(s, init_state(2).unwrap());
    }
}
