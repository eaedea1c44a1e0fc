//! Random-circuit sampling toolkit: circuit IR, OpenQASM 2.0 I/O, a state-vector engine with
//! Pauli error injection, random circuit generation on device layouts, and cross-entropy
//! benchmarking statistics.

pub mod circuit;
pub mod qasm;
pub mod rcs;
pub mod sim;
pub mod xeb;

pub use circuit::{Circuit, Cycle, Gate, GateKind};
pub use qasm::{emit_qasm, lower_to_circuit, parse_qasm};
pub use sim::{Engine, SampleSet, StateVector};

/// Version of the simulation engine recorded in benchmark results.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
