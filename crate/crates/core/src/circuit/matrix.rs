//! Small fixed-size gate matrices and a dense square matrix used for whole-circuit
//! unitaries and equivalence checks.

use num_complex::Complex64 as C64;

pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn mat2_dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn mat4_dagger(a: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = a[c][r].conj();
        }
    }
    out
}

/// `‖U†U − I‖_max` for a 2×2 matrix.
pub fn mat2_unitarity_error(a: &Mat2) -> f64 {
    let p = mat2_mul(&mat2_dagger(a), a);
    let mut err = 0.0f64;
    for (r, row) in p.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let target = if r == c { ONE } else { ZERO };
            err = err.max((v - target).norm());
        }
    }
    err
}

/// `‖U†U − I‖_max` for a 4×4 matrix.
pub fn mat4_unitarity_error(a: &Mat4) -> f64 {
    let p = mat4_mul(&mat4_dagger(a), a);
    let mut err = 0.0f64;
    for (r, row) in p.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let target = if r == c { ONE } else { ZERO };
            err = err.max((v - target).norm());
        }
    }
    err
}

/// Dense row-major complex square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if `data.len()` is not a square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data does not match dimension");
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: C64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[r * n..(r + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> DenseMatrix {
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn unitarity_error(&self) -> f64 {
        let p = self.dagger().matmul(self);
        p.max_abs_diff(&DenseMatrix::identity(self.dim))
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        max_abs_diff(&self.data, &other.data)
    }

    /// Max entrywise deviation after rotating `other` by the global phase that best
    /// aligns it with `self`.
    pub fn phase_aligned_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        phase_aligned_diff(&self.data, &other.data)
    }
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// The phase `e^{iα}` maximizing `Re(e^{iα}·⟨b, a⟩)`, i.e. the rotation that best maps `b` onto `a`.
pub fn global_phase(a: &[C64], b: &[C64]) -> C64 {
    let overlap: C64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    if overlap.norm() == 0.0 {
        ONE
    } else {
        overlap / overlap.norm()
    }
}

pub fn phase_aligned_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let phase = global_phase(a, b);
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}
