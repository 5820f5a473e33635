//! Symmetric `n x n` matrices (`n` in 1..=3) stored as their upper triangle.
//!
//! The Frobenius inner product makes the space Euclidean. [`SymMatrix::to_coords`]
//! maps a matrix to coordinates in a fixed orthonormal basis: the first
//! coordinate is the hydrostatic component along `Id / sqrt(n)`, the remaining
//! `n(n+1)/2 - 1` coordinates span the trace-free (deviatoric) subspace.
//!
//! Deviatoric basis for `n = 3`, in coordinate order:
//! `diag(1,-1,0)/sqrt2`, `diag(1,1,-2)/sqrt6`, `(e1e2 + e2e1)/sqrt2`,
//! `(e1e3 + e3e1)/sqrt2`, `(e2e3 + e3e2)/sqrt2`.
//! For `n = 2`: `diag(1,-1)/sqrt2`, `(e1e2 + e2e1)/sqrt2`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Index of `(i, j)` with `i <= j` in the packed upper triangle.
#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match n {
        1 => 0,
        2 => [[0, 1], [1, 2]][i][j],
        _ => [[0, 1, 2], [1, 3, 4], [2, 4, 5]][i][j],
    }
}

/// Number of packed entries for dimension `n`.
pub const fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Dimension of the trace-free subspace for dimension `n` (0 for `n = 1`).
pub const fn deviatoric_dim(n: usize) -> usize {
    packed_len(n) - 1
}

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    upper: [f64; 6],
}

impl SymMatrix {
    /// Zero matrix. Panics if `n` is not 1, 2 or 3.
    pub fn zeros(n: usize) -> Self {
        assert!((1..=3).contains(&n), "SymMatrix supports n in 1..=3, got {n}");
        SymMatrix { n, upper: [0.0; 6] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn scalar(value: f64) -> Self {
        let mut m = Self::zeros(1);
        m.upper[0] = value;
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds from packed upper-triangle entries (row-major).
    pub fn from_upper(n: usize, entries: &[f64]) -> Self {
        let mut m = Self::zeros(n);
        assert_eq!(entries.len(), packed_len(n), "wrong packed length for n = {n}");
        m.upper[..entries.len()].copy_from_slice(entries);
        m
    }

    /// Builds from a full row-major matrix, symmetrizing.
    pub fn from_full(n: usize, rows: &[[f64; 3]]) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, 0.5 * (rows[i][j] + rows[j][i]));
            }
        }
        m
    }

    /// `sum_k w_k v_k v_k^T` for orthonormal `v_k` given as columns.
    pub fn from_spectral(values: &[f64], vectors: &[[f64; 3]; 3]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..n).map(|k| values[k] * vectors[k][i] * vectors[k][j]).sum();
                m.set(i, j, s);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[packed_index(self.n, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.upper[packed_index(self.n, i, j)] = value;
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper[..packed_len(self.n)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.n, other.n);
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.get(i, i) * other.get(i, i);
            for j in (i + 1)..self.n {
                s += 2.0 * self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Splits `m = dev + (trace / n) Id` and returns `(dev, trace)`.
    pub fn deviatoric_split(&self) -> (SymMatrix, f64) {
        let tr = self.trace();
        let mean = tr / self.n as f64;
        let mut dev = *self;
        for i in 0..self.n {
            let v = dev.get(i, i) - mean;
            dev.set(i, i, v);
        }
        // Remove the rounding residue left on the diagonal.
        if self.n > 1 {
            let resid = dev.trace() / self.n as f64;
            for i in 0..self.n {
                let v = dev.get(i, i) - resid;
                dev.set(i, i, v);
            }
        }
        (dev, tr)
    }

    pub fn deviatoric(&self) -> SymMatrix {
        self.deviatoric_split().0
    }

    /// Coordinates in the orthonormal basis `[Id/sqrt(n), deviatoric basis...]`.
    /// For `n = 1` this is just `[value]`.
    pub fn to_coords(&self) -> Vec<f64> {
        let mut c = vec![self.trace() / (self.n as f64).sqrt()];
        c.extend(self.deviatoric_coords());
        c
    }

    /// Coordinates of the deviatoric part in the deviatoric basis.
    pub fn deviatoric_coords(&self) -> Vec<f64> {
        match self.n {
            1 => Vec::new(),
            2 => vec![(self.get(0, 0) - self.get(1, 1)) / SQRT2, SQRT2 * self.get(0, 1)],
            _ => vec![
                (self.get(0, 0) - self.get(1, 1)) / SQRT2,
                (self.get(0, 0) + self.get(1, 1) - 2.0 * self.get(2, 2)) / 6f64.sqrt(),
                SQRT2 * self.get(0, 1),
                SQRT2 * self.get(0, 2),
                SQRT2 * self.get(1, 2),
            ],
        }
    }

    /// Inverse of [`SymMatrix::to_coords`].
    pub fn from_coords(n: usize, coords: &[f64]) -> SymMatrix {
        assert_eq!(coords.len(), packed_len(n));
        let mut m = SymMatrix::from_deviatoric_coords(n, &coords[1..]);
        let mean = coords[0] / (n as f64).sqrt();
        for i in 0..n {
            let v = m.get(i, i) + mean;
            m.set(i, i, v);
        }
        m
    }

    /// Trace-free matrix with the given deviatoric coordinates.
    pub fn from_deviatoric_coords(n: usize, c: &[f64]) -> SymMatrix {
        assert_eq!(c.len(), deviatoric_dim(n));
        let mut m = SymMatrix::zeros(n);
        match n {
            1 => {}
            2 => {
                m.set(0, 0, c[0] / SQRT2);
                m.set(1, 1, -c[0] / SQRT2);
                m.set(0, 1, c[1] / SQRT2);
            }
            _ => {
                let s6 = 6f64.sqrt();
                m.set(0, 0, c[0] / SQRT2 + c[1] / s6);
                m.set(1, 1, -c[0] / SQRT2 + c[1] / s6);
                m.set(2, 2, -2.0 * c[1] / s6);
                m.set(0, 1, c[2] / SQRT2);
                m.set(0, 2, c[3] / SQRT2);
                m.set(1, 2, c[4] / SQRT2);
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.upper().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.upper().iter().all(|v| v.is_finite())
    }

    /// Dense row-major copy, padded to 3x3.
    pub fn to_full(&self) -> [[f64; 3]; 3] {
        let mut a = [[0.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate().take(self.n) {
            for (j, e) in row.iter_mut().enumerate().take(self.n) {
                *e = self.get(i, j);
            }
        }
        a
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMatrix{}{:?}", self.n, self.upper())
    }
}

impl Add for SymMatrix {
    type Output = SymMatrix;
    fn add(mut self, rhs: SymMatrix) -> SymMatrix {
        self += rhs;
        self
    }
}

impl AddAssign for SymMatrix {
    fn add_assign(&mut self, rhs: SymMatrix) {
        debug_assert_eq!(self.n, rhs.n);
        for (a, b) in self.upper.iter_mut().zip(rhs.upper.iter()) {
            *a += b;
        }
    }
}

impl Sub for SymMatrix {
    type Output = SymMatrix;
    fn sub(mut self, rhs: SymMatrix) -> SymMatrix {
        self -= rhs;
        self
    }
}

impl SubAssign for SymMatrix {
    fn sub_assign(&mut self, rhs: SymMatrix) {
        debug_assert_eq!(self.n, rhs.n);
        for (a, b) in self.upper.iter_mut().zip(rhs.upper.iter()) {
            *a -= b;
        }
    }
}

impl Mul<f64> for SymMatrix {
    type Output = SymMatrix;
    fn mul(mut self, s: f64) -> SymMatrix {
        for a in self.upper.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl Mul<SymMatrix> for f64 {
    type Output = SymMatrix;
    fn mul(self, m: SymMatrix) -> SymMatrix {
        m * self
    }
}

impl Neg for SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self * -1.0
    }
}
