//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of [`Cycle`]s over `n` qubits; each cycle holds gates on
//! pairwise-disjoint qubits. Amplitude indexing is little-endian: qubit `q` is bit `q` of a basis
//! index, so qubit 0 is the least-significant bit of a sampled bitstring.
//!
//! Two-qubit matrices are written in the textbook order of their target list: for targets
//! `[a, b]` the local basis index is `2·bit(a) + bit(b)`, i.e. `|00⟩, |01⟩, |10⟩, |11⟩` with the
//! first target as the high bit.

pub mod layout;
pub mod matrix;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64 as C64;
use thiserror::Error;

pub use layout::{grid_layout, near_square_grid, DeviceLayout, Edge, GridScheme, LayoutError, PatternLetter};
pub use matrix::{DenseMatrix, Mat2, Mat4};

use matrix::{I, ONE, ZERO};

/// Largest qubit count for which [`circuit_unitary`] builds a dense matrix by default.
pub const DEFAULT_UNITARY_CAP: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate {kind} expects {expected} target(s), got {got}")]
    Arity { kind: String, expected: usize, got: usize },
    #[error("gate {kind} targets qubit {qubit} more than once")]
    RepeatedTarget { kind: String, qubit: usize },
    #[error("qubit {qubit} is used by more than one gate in the same cycle")]
    OverlappingCycle { qubit: usize },
    #[error("gate {kind} targets qubit {qubit}, but the circuit has {n} qubits")]
    QubitOutOfRange { kind: String, qubit: usize, n: usize },
    #[error("dense unitary of {n} qubits exceeds the cap of {cap}")]
    UnitaryCap { n: usize, cap: usize },
}

/// The unitary carried by a gate.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    SqrtX,
    SqrtY,
    SqrtW,
    /// Fermionic simulation gate with swap angle `theta` and conditional phase `phi` (radians).
    FSim { theta: f64, phi: f64 },
    PauliX,
    PauliY,
    PauliZ,
    Generic1Q(Mat2),
    Generic2Q(Mat4),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::FSim { .. } | GateKind::Generic2Q(_) => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::SqrtX => "sqrt_x",
            GateKind::SqrtY => "sqrt_y",
            GateKind::SqrtW => "sqrt_w",
            GateKind::FSim { .. } => "fsim",
            GateKind::PauliX => "x",
            GateKind::PauliY => "y",
            GateKind::PauliZ => "z",
            GateKind::Generic1Q(_) => "u1q",
            GateKind::Generic2Q(_) => "u2q",
        }
    }

    /// Defining matrix; see [`gate_matrix`].
    pub fn matrix(&self) -> GateMatrix {
        gate_matrix(self)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::FSim { theta, phi } => write!(f, "fsim({theta}, {phi})"),
            other => f.write_str(other.name()),
        }
    }
}

/// A 2×2 or 4×4 gate matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

impl GateMatrix {
    pub fn unitarity_error(&self) -> f64 {
        match self {
            GateMatrix::One(m) => matrix::mat2_unitarity_error(m),
            GateMatrix::Two(m) => matrix::mat4_unitarity_error(m),
        }
    }

    pub fn as_mat2(&self) -> Option<&Mat2> {
        match self {
            GateMatrix::One(m) => Some(m),
            GateMatrix::Two(_) => None,
        }
    }

    pub fn as_mat4(&self) -> Option<&Mat4> {
        match self {
            GateMatrix::Two(m) => Some(m),
            GateMatrix::One(_) => None,
        }
    }
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Mat2 {
    [[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

/// `W = (X + Y)/√2`.
pub fn pauli_w() -> Mat2 {
    let s = FRAC_1_SQRT_2;
    [[ZERO, C64::new(s, -s)], [C64::new(s, s), ZERO]]
}

/// Principal square root of a Hermitian involution `P`: `(1+i)/2 · (I − iP)`.
fn principal_sqrt(p: &Mat2) -> Mat2 {
    let pre = C64::new(0.5, 0.5);
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c { ONE } else { ZERO };
            out[r][c] = pre * (id - I * p[r][c]);
        }
    }
    out
}

/// `FSim(θ, φ)` in the `|00⟩, |01⟩, |10⟩, |11⟩` basis.
pub fn fsim_matrix(theta: f64, phi: f64) -> Mat4 {
    let c = C64::new(theta.cos(), 0.0);
    let s = C64::new(0.0, -theta.sin());
    [
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, c, s, ZERO],
        [ZERO, s, c, ZERO],
        [ZERO, ZERO, ZERO, C64::from_polar(1.0, -phi)],
    ]
}

/// Standard OpenQASM `U(θ, φ, λ)` matrix.
pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
        [C64::from_polar(s, phi), C64::from_polar(c, phi + lambda)],
    ]
}

/// `CX` with the first target as control.
pub fn cx_matrix() -> Mat4 {
    [
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, ONE, ZERO, ZERO],
        [ZERO, ZERO, ZERO, ONE],
        [ZERO, ZERO, ONE, ZERO],
    ]
}

/// Defining unitary of a gate kind.
///
/// `√X`, `√Y`, `√W` are principal square roots (eigenphases in `(−π/2, π/2]`). `FSim` follows the
/// Cirq sign convention: `−i·sin θ` off-diagonal in the swap subspace and `e^{−iφ}` on `|11⟩`.
pub fn gate_matrix(kind: &GateKind) -> GateMatrix {
    match kind {
        GateKind::SqrtX => GateMatrix::One(principal_sqrt(&pauli_x())),
        GateKind::SqrtY => GateMatrix::One(principal_sqrt(&pauli_y())),
        GateKind::SqrtW => GateMatrix::One(principal_sqrt(&pauli_w())),
        GateKind::FSim { theta, phi } => GateMatrix::Two(fsim_matrix(*theta, *phi)),
        GateKind::PauliX => GateMatrix::One(pauli_x()),
        GateKind::PauliY => GateMatrix::One(pauli_y()),
        GateKind::PauliZ => GateMatrix::One(pauli_z()),
        GateKind::Generic1Q(m) => GateMatrix::One(*m),
        GateKind::Generic2Q(m) => GateMatrix::Two(*m),
    }
}

/// A gate kind bound to its target qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self, CircuitError> {
        if targets.len() != kind.arity() {
            return Err(CircuitError::Arity {
                kind: kind.to_string(),
                expected: kind.arity(),
                got: targets.len(),
            });
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(CircuitError::RepeatedTarget { kind: kind.to_string(), qubit: targets[0] });
        }
        Ok(Self { kind, targets })
    }

    pub fn single(kind: GateKind, q: usize) -> Result<Self, CircuitError> {
        Self::new(kind, vec![q])
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Result<Self, CircuitError> {
        Self::new(kind, vec![a, b])
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> GateMatrix {
        gate_matrix(&self.kind)
    }
}

/// One moment of a circuit: gates on pairwise-disjoint qubits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Cycle {
    gates: Vec<Gate>,
}

impl Cycle {
    pub fn new(gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut seen: Vec<usize> = gates.iter().flat_map(|g| g.targets.iter().copied()).collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(CircuitError::OverlappingCycle { qubit: w[0] });
        }
        Ok(Self { gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn touches(&self, q: usize) -> bool {
        self.gates.iter().any(|g| g.targets.contains(&q))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CircuitMeta {
    /// Algorithm cycles (a 1q layer plus a 2q layer each); `cycles.len()` counts layers.
    pub m: usize,
    pub pattern: String,
    pub seed: u64,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    cycles: Vec<Cycle>,
    meta: CircuitMeta,
}

impl Circuit {
    pub fn new(n: usize, cycles: Vec<Cycle>, meta: CircuitMeta) -> Result<Self, CircuitError> {
        for gate in cycles.iter().flat_map(|c| c.gates.iter()) {
            if let Some(&q) = gate.targets.iter().find(|&&q| q >= n) {
                return Err(CircuitError::QubitOutOfRange { kind: gate.kind.to_string(), qubit: q, n });
            }
        }
        Ok(Self { n, cycles, meta })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, cycles: Vec::new(), meta: CircuitMeta::default() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn meta(&self) -> &CircuitMeta {
        &self.meta
    }

    pub fn with_meta(mut self, meta: CircuitMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> + '_ {
        self.cycles.iter().flat_map(|c| c.gates.iter())
    }

    /// Total gate instances, 1q and 2q alike.
    pub fn gate_count(&self) -> usize {
        self.cycles.iter().map(Cycle::len).sum()
    }

    /// Sum of target counts over all gates.
    pub fn target_count(&self) -> usize {
        self.gates().map(|g| g.targets.len()).sum()
    }
}

/// Whole-circuit unitary with the default qubit cap.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DenseMatrix, CircuitError> {
    circuit_unitary_capped(circuit, DEFAULT_UNITARY_CAP)
}

/// Product of the cycle unitaries in application order, as a `2^n × 2^n` matrix.
pub fn circuit_unitary_capped(circuit: &Circuit, cap: usize) -> Result<DenseMatrix, CircuitError> {
    if circuit.n > cap {
        return Err(CircuitError::UnitaryCap { n: circuit.n, cap });
    }
    let dim = 1usize << circuit.n;
    let mut u = DenseMatrix::identity(dim);
    for gate in circuit.gates() {
        left_multiply(&mut u, gate);
    }
    Ok(u)
}

/// `u ← G·u` where `G` is `gate` embedded on its targets. Works on whole rows.
fn left_multiply(u: &mut DenseMatrix, gate: &Gate) {
    let dim = u.dim();
    let data = u.as_mut_slice();
    match gate.matrix() {
        GateMatrix::One(m) => {
            let bit = 1usize << gate.targets[0];
            for r0 in (0..dim).filter(|r| r & bit == 0) {
                let r1 = r0 | bit;
                for c in 0..dim {
                    let a0 = data[r0 * dim + c];
                    let a1 = data[r1 * dim + c];
                    data[r0 * dim + c] = m[0][0] * a0 + m[0][1] * a1;
                    data[r1 * dim + c] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
        GateMatrix::Two(m) => {
            let (ba, bb) = (1usize << gate.targets[0], 1usize << gate.targets[1]);
            let rows = |base: usize| [base, base | bb, base | ba, base | ba | bb];
            for base in (0..dim).filter(|r| r & (ba | bb) == 0) {
                let idx = rows(base);
                for c in 0..dim {
                    let a: [C64; 4] = std::array::from_fn(|l| data[idx[l] * dim + c]);
                    for (l, &r) in idx.iter().enumerate() {
                        data[r * dim + c] = (0..4).map(|k| m[l][k] * a[k]).sum();
                    }
                }
            }
        }
    }
}
