#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcslab::circuit::{Circuit, CircuitMeta, Cycle, Gate, GateKind, GateMatrix, Mat2, Mat4};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Random unitary: Gram–Schmidt on columns of a complex Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    let mut cols: Vec<Vec<C64>> = (0..dim).map(|_| (0..dim).map(|_| complex_gaussian(rng)).collect()).collect();
    for i in 0..dim {
        for j in 0..i {
            let proj: C64 = (0..dim).map(|k| cols[j][k].conj() * cols[i][k]).sum();
            for k in 0..dim {
                let v = cols[j][k];
                cols[i][k] -= proj * v;
            }
        }
        let norm = cols[i].iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        cols[i].iter_mut().for_each(|z| *z /= norm);
    }
    (0..dim * dim).map(|idx| cols[idx % dim][idx / dim]).collect()
}

pub fn mat2(v: &[C64]) -> Mat2 {
    [[v[0], v[1]], [v[2], v[3]]]
}

pub fn mat4(v: &[C64]) -> Mat4 {
    std::array::from_fn(|r| std::array::from_fn(|c| v[4 * r + c]))
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..1usize << n).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

pub fn random_kind(arity: usize, rng: &mut impl Rng) -> GateKind {
    if arity == 1 {
        match rng.random_range(0..7) {
            0 => GateKind::SqrtX,
            1 => GateKind::SqrtY,
            2 => GateKind::SqrtW,
            3 => GateKind::PauliX,
            4 => GateKind::PauliY,
            5 => GateKind::PauliZ,
            _ => GateKind::Generic1Q(mat2(&random_unitary(2, rng))),
        }
    } else if rng.random_bool(0.5) {
        GateKind::FSim { theta: rng.random_range(-4.0..4.0), phi: rng.random_range(-4.0..4.0) }
    } else {
        GateKind::Generic2Q(mat4(&random_unitary(4, rng)))
    }
}

/// Random circuit with one gate per cycle.
pub fn random_circuit(n: usize, gates: usize, rng: &mut impl Rng) -> Circuit {
    let mut cycles = Vec::new();
    for _ in 0..gates {
        let gate = if n >= 2 && rng.random_bool(0.4) {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            Gate::two(random_kind(2, rng), a, b).unwrap()
        } else {
            Gate::single(random_kind(1, rng), rng.random_range(0..n)).unwrap()
        };
        cycles.push(Cycle::new(vec![gate]).unwrap());
    }
    Circuit::new(n, cycles, CircuitMeta::default()).unwrap()
}

/// `small` (k×k, row-major, first target = most significant local bit) embedded into `n` qubits.
pub fn embed(n: usize, targets: &[usize], small: &[C64]) -> Vec<C64> {
    let dim = 1usize << n;
    let k = targets.len();
    let local = |i: usize| targets.iter().fold(0usize, |acc, &t| (acc << 1) | ((i >> t) & 1));
    let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            if (r & !mask) == (c & !mask) {
                out[r * dim + c] = small[local(r) * (1 << k) + local(c)];
            }
        }
    }
    out
}

pub fn matmul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

pub fn identity(dim: usize) -> Vec<C64> {
    (0..dim * dim).map(|i| if i % (dim + 1) == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect()
}

pub fn flat_matrix(m: &GateMatrix) -> Vec<C64> {
    match m {
        GateMatrix::One(m) => m.iter().flatten().copied().collect(),
        GateMatrix::Two(m) => m.iter().flatten().copied().collect(),
    }
}

/// Whole-circuit unitary built from explicit Kronecker embeddings.
pub fn oracle_unitary(circuit: &Circuit) -> Vec<C64> {
    let dim = 1usize << circuit.n();
    circuit.gates().fold(identity(dim), |acc, g| {
        matmul(&embed(circuit.n(), g.targets(), &flat_matrix(&g.matrix())), &acc, dim)
    })
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Max entrywise difference after rotating `b` by the best global phase.
pub fn phase_aligned(a: &[C64], b: &[C64]) -> f64 {
    let overlap: C64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() == 0.0 { C64::new(1.0, 0.0) } else { overlap / overlap.norm() };
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}
