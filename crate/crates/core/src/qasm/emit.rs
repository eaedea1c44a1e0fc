//! Circuit to OpenQASM 2.0 text.
//!
//! Named gates are written through small `gate` definitions placed at the top of the file.
//! Arbitrary 1-qubit matrices become `U(θ,φ,λ)`; arbitrary 2-qubit matrices are decomposed into
//! `U` and `CX` (Givens reduction in Gray-code order, each two-level rotation realized as a
//! controlled-U). Every emitted program reproduces the circuit's unitary up to a global phase.

use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64 as C64;

use crate::circuit::matrix::{mat2_mul, phase_aligned_diff, ONE, ZERO};
use crate::circuit::{cx_matrix, Circuit, GateKind, Mat2, Mat4};

/// Primitive operation on the local qubits `0` (first target) and `1` (second target).
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Op {
    U { q: usize, angles: [f64; 3] },
    Cx { c: usize, t: usize },
}

const SX_DEF: &str = "gate sx a { U(pi/2,-pi/2,pi/2) a; }";
const SY_DEF: &str = "gate sy a { U(pi/2,0,0) a; }";
const SW_DEF: &str = "gate sw a { U(pi/2,-pi/4,pi/4) a; }";
const FSIM_DEF: &str = "gate fsim(theta,phi) a,b {
  h a; h b; cx a,b; rz(theta) b; cx a,b; h a; h b;
  sdg a; h a; sdg b; h b; cx a,b; rz(theta) b; cx a,b; h a; s a; h b; s b;
  cu1(-phi) a,b;
}";

/// Shortest round-trip decimal for `x`, always containing a decimal point.
pub(crate) fn fmt_real(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') {
        s
    } else if let Some(e) = s.find('e') {
        format!("{}.0{}", &s[..e], &s[e..])
    } else {
        format!("{s}.0")
    }
}

/// Angles `(θ, φ, λ)` with `m = e^{ig}·U(θ, φ, λ)` for some global phase `g`.
pub(crate) fn zyz_angles(m: &Mat2) -> [f64; 3] {
    let theta = 2.0 * m[1][0].norm().atan2(m[0][0].norm());
    let g = m[0][0].arg();
    if m[0][0].norm() >= m[1][0].norm() {
        // φ+λ is pinned by m11 so that a vanishing m10 cannot spoil it
        let phi = m[1][0].arg() - g;
        let sum = m[1][1].arg() - g;
        [theta, phi, sum - phi]
    } else {
        [theta, m[1][0].arg() - g, (-m[0][1]).arg() - g]
    }
}

fn rz(a: f64) -> Mat2 {
    [[C64::from_polar(1.0, -a / 2.0), ZERO], [ZERO, C64::from_polar(1.0, a / 2.0)]]
}

fn ry(a: f64) -> Mat2 {
    let (s, c) = (a / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
}

fn is_identity(v: &Mat2) -> bool {
    let id = [[ONE, ZERO], [ZERO, ONE]];
    (0..2).all(|i| (0..2).all(|j| (v[i][j] - id[i][j]).norm() < 1e-15))
}

const X_ANGLES: [f64; 3] = [PI, 0.0, PI];

/// Controlled-`v` with `ctrl` selecting on value `ctrl_value`, exact including `v`'s phase.
fn controlled(ctrl: usize, target: usize, ctrl_value: usize, v: &Mat2, out: &mut Vec<Op>) {
    if is_identity(v) {
        return;
    }
    let [theta, phi, lambda] = zyz_angles(v);
    let u = crate::circuit::u3_matrix(theta, phi, lambda);
    let g = (v[0][0] * u[0][0].conj() + v[1][0] * u[1][0].conj() + v[0][1] * u[0][1].conj() + v[1][1] * u[1][1].conj()).arg();
    let alpha = g + (phi + lambda) / 2.0;
    let a = mat2_mul(&rz(phi), &ry(theta / 2.0));
    let b = mat2_mul(&ry(-theta / 2.0), &rz(-(lambda + phi) / 2.0));
    let c = rz((lambda - phi) / 2.0);
    if ctrl_value == 0 {
        out.push(Op::U { q: ctrl, angles: X_ANGLES });
    }
    out.push(Op::U { q: target, angles: zyz_angles(&c) });
    out.push(Op::Cx { c: ctrl, t: target });
    out.push(Op::U { q: target, angles: zyz_angles(&b) });
    out.push(Op::Cx { c: ctrl, t: target });
    out.push(Op::U { q: target, angles: zyz_angles(&a) });
    out.push(Op::U { q: ctrl, angles: [0.0, 0.0, alpha] });
    if ctrl_value == 0 {
        out.push(Op::U { q: ctrl, angles: X_ANGLES });
    }
}

/// Two-level unitary `v` on the local basis states `s0`, `s1`, which differ in one bit.
fn two_level(s0: usize, s1: usize, v: &Mat2, out: &mut Vec<Op>) {
    let diff = s0 ^ s1;
    // local index = 2·bit(q0) + bit(q1)
    let (target, ctrl, ctrl_value, target_bit) =
        if diff == 1 { (1, 0, (s0 >> 1) & 1, s0 & 1) } else { (0, 1, s0 & 1, (s0 >> 1) & 1) };
    let v = if target_bit == 1 { [[v[1][1], v[1][0]], [v[0][1], v[0][0]]] } else { *v };
    controlled(ctrl, target, ctrl_value, &v, out);
}

/// `U`/`CX` sequence reproducing `m` up to a global phase.
pub(crate) fn decompose_2q(m: &Mat4) -> Vec<Op> {
    let flat = |m: &Mat4| m.iter().flatten().copied().collect::<Vec<_>>();
    let target = flat(m);
    if phase_aligned_diff(&target, &flat(&cx_matrix())) < 1e-14 {
        return vec![Op::Cx { c: 0, t: 1 }];
    }
    let reversed = {
        let mut r = [[ZERO; 4]; 4];
        for (from, to) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
            r[to][from] = ONE;
        }
        r
    };
    if phase_aligned_diff(&target, &flat(&reversed)) < 1e-14 {
        return vec![Op::Cx { c: 1, t: 0 }];
    }

    const GRAY: [usize; 4] = [0, 1, 3, 2];
    let mut w = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            w[i][j] = m[GRAY[i]][GRAY[j]];
        }
    }
    let mut rotations: Vec<(usize, Mat2)> = Vec::new();
    for c in 0..3 {
        for r in (c + 1..4).rev() {
            let (x, y) = (w[r - 1][c], w[r][c]);
            if y.norm() < 1e-15 {
                continue;
            }
            let nm = x.norm().hypot(y.norm());
            let g = [[x.conj() / nm, y.conj() / nm], [-y / nm, x / nm]];
            let (top, bottom) = w.split_at_mut(r);
            for (a, b) in top[r - 1].iter_mut().zip(bottom[0].iter_mut()) {
                (*a, *b) = (g[0][0] * *a + g[0][1] * *b, g[1][0] * *a + g[1][1] * *b);
            }
            rotations.push((r, g));
        }
    }

    let mut out = Vec::new();
    let mut diag = [ZERO; 4];
    for i in 0..4 {
        diag[GRAY[i]] = w[i][i];
    }
    controlled(0, 1, 0, &[[diag[0], ZERO], [ZERO, diag[1]]], &mut out);
    controlled(0, 1, 1, &[[diag[2], ZERO], [ZERO, diag[3]]], &mut out);
    for &(r, g) in rotations.iter().rev() {
        let g_dag = [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]];
        two_level(GRAY[r - 1], GRAY[r], &g_dag, &mut out);
    }
    out
}

/// Renders `circuit` as an OpenQASM 2.0 program over a single register `q`.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\n");
    let kinds: Vec<&GateKind> = circuit.gates().map(|g| g.kind()).collect();
    let uses = |f: fn(&GateKind) -> bool| kinds.iter().any(|k| f(k));
    // the fsim definition and the Pauli gates come from the standard library
    if uses(|k| matches!(k, GateKind::FSim { .. } | GateKind::PauliX | GateKind::PauliY | GateKind::PauliZ)) {
        out.push_str("include \"qelib1.inc\";\n");
    }
    let meta = circuit.meta();
    if !meta.label.is_empty() {
        let _ = writeln!(out, "// {}", meta.label);
    }
    for (needed, def) in [
        (uses(|k| matches!(k, GateKind::SqrtX)), SX_DEF),
        (uses(|k| matches!(k, GateKind::SqrtY)), SY_DEF),
        (uses(|k| matches!(k, GateKind::SqrtW)), SW_DEF),
        (uses(|k| matches!(k, GateKind::FSim { .. })), FSIM_DEF),
    ] {
        if needed {
            out.push_str(def);
            out.push('\n');
        }
    }
    let _ = writeln!(out, "qreg q[{}];", circuit.n());

    for (j, cycle) in circuit.cycles().iter().enumerate() {
        let _ = writeln!(out, "// cycle {j}");
        for gate in cycle.gates() {
            let t = gate.targets();
            match gate.kind() {
                GateKind::SqrtX => writeln!(out, "sx q[{}];", t[0]),
                GateKind::SqrtY => writeln!(out, "sy q[{}];", t[0]),
                GateKind::SqrtW => writeln!(out, "sw q[{}];", t[0]),
                GateKind::PauliX => writeln!(out, "x q[{}];", t[0]),
                GateKind::PauliY => writeln!(out, "y q[{}];", t[0]),
                GateKind::PauliZ => writeln!(out, "z q[{}];", t[0]),
                GateKind::FSim { theta, phi } => {
                    writeln!(out, "fsim({},{}) q[{}],q[{}];", fmt_real(*theta), fmt_real(*phi), t[0], t[1])
                }
                GateKind::Generic1Q(m) => write_u(&mut out, zyz_angles(m), t[0]),
                GateKind::Generic2Q(m) => {
                    for op in decompose_2q(m) {
                        match op {
                            Op::U { q, angles } => write_u(&mut out, angles, t[q]),
                            Op::Cx { c, t: tt } => writeln!(out, "CX q[{}],q[{}];", t[c], t[tt]),
                        }
                        .expect("writing to a String cannot fail");
                    }
                    Ok(())
                }
            }
            .expect("writing to a String cannot fail");
        }
    }
    out
}

fn write_u(out: &mut String, [a, b, c]: [f64; 3], q: usize) -> std::fmt::Result {
    writeln!(out, "U({},{},{}) q[{}];", fmt_real(a), fmt_real(b), fmt_real(c), q)
}
