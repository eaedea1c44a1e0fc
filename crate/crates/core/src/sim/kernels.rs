//! Gate application kernels over a little-endian amplitude array.
//!
//! Both kernels partition the array into independent blocks keyed by the target bits, so the
//! parallel and sequential paths perform identical arithmetic on identical operands and produce
//! bit-identical results.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::circuit::{Mat2, Mat4};

/// Arrays of at least `2^PAR_MIN_QUBITS` amplitudes are processed with rayon.
pub(crate) const PAR_MIN_QUBITS: usize = 14;

/// Minimum amplitudes handed to one rayon task.
const PAR_GRAIN: usize = 1 << 12;

#[inline(always)]
fn mix2(m: &Mat2, lo: &mut C64, hi: &mut C64) {
    let (a0, a1) = (*lo, *hi);
    *lo = m[0][0] * a0 + m[0][1] * a1;
    *hi = m[1][0] * a0 + m[1][1] * a1;
}

#[inline(always)]
fn mix4(m: &Mat4, x0: &mut C64, x1: &mut C64, x2: &mut C64, x3: &mut C64) {
    let a = [*x0, *x1, *x2, *x3];
    let row = |r: usize| m[r][0] * a[0] + m[r][1] * a[1] + m[r][2] * a[2] + m[r][3] * a[3];
    *x0 = row(0);
    *x1 = row(1);
    *x2 = row(2);
    *x3 = row(3);
}

/// Applies a 2×2 unitary to qubit `q`.
pub(crate) fn apply_1q(amps: &mut [C64], q: usize, m: &Mat2, parallel: bool) {
    let half = 1usize << q;
    let block = half << 1;
    debug_assert!(amps.len() >= block);
    let body = |chunk: &mut [C64]| {
        let (lo, hi) = chunk.split_at_mut(half);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            mix2(m, a, b);
        }
    };
    if !parallel {
        amps.chunks_mut(block).for_each(body);
    } else if block >= PAR_GRAIN {
        // few large blocks: split each block's halves across tasks
        amps.par_chunks_mut(block).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(half);
            lo.par_chunks_mut(PAR_GRAIN / 2)
                .zip(hi.par_chunks_mut(PAR_GRAIN / 2))
                .for_each(|(l, h)| {
                    for (a, b) in l.iter_mut().zip(h.iter_mut()) {
                        mix2(m, a, b);
                    }
                });
        });
    } else {
        amps.par_chunks_mut(block).with_min_len(PAR_GRAIN / block).for_each(body);
    }
}

/// Reorders a matrix written for targets `(t0, t1)` into `(high qubit, low qubit)` order.
fn to_high_low(m: &Mat4, t0_is_high: bool) -> Mat4 {
    if t0_is_high {
        return *m;
    }
    const P: [usize; 4] = [0, 2, 1, 3];
    std::array::from_fn(|r| std::array::from_fn(|c| m[P[r]][P[c]]))
}

/// Applies a 4×4 unitary to targets `(t0, t1)`, where `t0` is the high bit of the local index.
pub(crate) fn apply_2q(amps: &mut [C64], t0: usize, t1: usize, m: &Mat4, parallel: bool) {
    let (hq, lq) = (t0.max(t1), t0.min(t1));
    let m = to_high_low(m, t0 == hq);
    let hhalf = 1usize << hq;
    let lhalf = 1usize << lq;
    let lblock = lhalf << 1;
    debug_assert!(amps.len() >= hhalf << 1);

    // within one (high = 0, high = 1) pair of sub-blocks, quadruples share the offset j
    let quad = |a: &mut [C64], b: &mut [C64]| {
        let (a0, a1) = a.split_at_mut(lhalf);
        let (b0, b1) = b.split_at_mut(lhalf);
        for j in 0..lhalf {
            mix4(&m, &mut a0[j], &mut a1[j], &mut b0[j], &mut b1[j]);
        }
    };
    if !parallel {
        for chunk in amps.chunks_mut(hhalf << 1) {
            let (c0, c1) = chunk.split_at_mut(hhalf);
            for (a, b) in c0.chunks_mut(lblock).zip(c1.chunks_mut(lblock)) {
                quad(a, b);
            }
        }
    } else {
        let min_len = (PAR_GRAIN / (2 * lblock)).max(1);
        let wide = lhalf >= PAR_GRAIN;
        amps.par_chunks_mut(hhalf << 1).for_each(|chunk| {
            let (c0, c1) = chunk.split_at_mut(hhalf);
            c0.par_chunks_mut(lblock)
                .zip(c1.par_chunks_mut(lblock))
                .with_min_len(min_len)
                .for_each(|(a, b)| {
                    if !wide {
                        return quad(a, b);
                    }
                    let (a0, a1) = a.split_at_mut(lhalf);
                    let (b0, b1) = b.split_at_mut(lhalf);
                    let g = PAR_GRAIN / 4;
                    a0.par_chunks_mut(g)
                        .zip(a1.par_chunks_mut(g))
                        .zip(b0.par_chunks_mut(g).zip(b1.par_chunks_mut(g)))
                        .for_each(|((x0, x1), (x2, x3))| {
                            for j in 0..x0.len() {
                                mix4(&m, &mut x0[j], &mut x1[j], &mut x2[j], &mut x3[j]);
                            }
                        });
                });
        });
    }
}
