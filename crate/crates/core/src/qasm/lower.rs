use thiserror::Error;

use super::ast::{Operand, QasmAst, Statement};
use crate::circuit::{cx_matrix, u3_matrix, Circuit, CircuitError, CircuitMeta, Cycle, Gate, GateKind};

/// Upper bound on the number of primitive gates produced by inlining.
pub const MAX_LOWERED_GATES: usize = 4_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum LowerError {
    #[error("gate `{0}` is opaque and has no definition to lower")]
    Opaque(String),
    #[error("gate `{name}` acts on {arity} qubits; only 1- and 2-qubit gates are supported")]
    UnsupportedArity { name: String, arity: usize },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("parameter of `{name}` evaluates to {value}")]
    NonFinite { name: String, value: f64 },
    #[error("circuit expands to more than {MAX_LOWERED_GATES} gates")]
    TooLarge,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Inlines every gate definition down to `U` / `CX` and packs the resulting gates greedily into
/// cycles: each gate joins the earliest cycle after the last one touching any of its qubits.
/// Measurements and barriers are dropped.
pub fn lower_to_circuit(ast: &QasmAst) -> Result<Circuit, LowerError> {
    let offsets = ast.qreg_offsets();
    let mut gates = Vec::new();
    for stmt in &ast.statements {
        let Statement::Gate(call) = stmt else { continue };
        let params: Vec<f64> = call.params.iter().map(|e| e.eval(&[])).collect();
        let width = call
            .args
            .iter()
            .find_map(|a| match a {
                Operand::Register { reg } => Some(ast.qregs[*reg].size),
                Operand::Bit { .. } => None,
            })
            .unwrap_or(1);
        for i in 0..width {
            let qubits: Vec<usize> = call
                .args
                .iter()
                .map(|a| match *a {
                    Operand::Bit { reg, index } => offsets[reg] + index,
                    Operand::Register { reg } => offsets[reg] + i,
                })
                .collect();
            expand(ast, &call.name, &params, &qubits, &mut gates)?;
        }
    }
    Ok(pack(ast.num_qubits(), gates)?)
}

fn expand(ast: &QasmAst, name: &str, params: &[f64], qubits: &[usize], out: &mut Vec<Gate>) -> Result<(), LowerError> {
    if let Some(&value) = params.iter().find(|v| !v.is_finite()) {
        return Err(LowerError::NonFinite { name: name.to_string(), value });
    }
    if out.len() >= MAX_LOWERED_GATES {
        return Err(LowerError::TooLarge);
    }
    match name {
        "U" => {
            out.push(Gate::single(GateKind::Generic1Q(u3_matrix(params[0], params[1], params[2])), qubits[0])?);
            return Ok(());
        }
        "CX" => {
            out.push(Gate::two(GateKind::Generic2Q(cx_matrix()), qubits[0], qubits[1])?);
            return Ok(());
        }
        _ => {}
    }
    let def = ast.gate_def(name).ok_or_else(|| LowerError::UnknownGate(name.to_string()))?;
    if def.opaque {
        return Err(if def.qargs.len() > 2 {
            LowerError::UnsupportedArity { name: name.to_string(), arity: def.qargs.len() }
        } else {
            LowerError::Opaque(name.to_string())
        });
    }
    for op in &def.body {
        let p: Vec<f64> = op.params.iter().map(|e| e.eval(params)).collect();
        let q: Vec<usize> = op.qargs.iter().map(|&i| qubits[i]).collect();
        expand(ast, &op.name, &p, &q, out)?;
    }
    Ok(())
}

/// Greedy as-soon-as-possible packing that preserves the order of gates sharing a qubit.
pub fn pack(n: usize, gates: Vec<Gate>) -> Result<Circuit, CircuitError> {
    let mut frontier = vec![0usize; n];
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    for gate in gates {
        let layer = gate.targets().iter().map(|&q| frontier.get(q).copied().unwrap_or(0)).max().unwrap_or(0);
        for &q in gate.targets() {
            if let Some(f) = frontier.get_mut(q) {
                *f = layer + 1;
            }
        }
        if layer == layers.len() {
            layers.push(Vec::new());
        }
        layers[layer].push(gate);
    }
    let cycles = layers.into_iter().map(Cycle::new).collect::<Result<Vec<_>, _>>()?;
    Circuit::new(n, cycles, CircuitMeta::default())
}
