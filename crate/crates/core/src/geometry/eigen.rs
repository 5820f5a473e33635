//! Closed-form spectral decomposition of symmetric 1x1, 2x2 and 3x3 matrices.
//!
//! The 3x3 path follows the non-iterative scheme of D. Eberly ("A Robust
//! Eigensolver for 3x3 Symmetric Matrices"): trigonometric eigenvalues on the
//! shifted and scaled matrix, then eigenvectors from cross products, the second
//! one computed inside the orthogonal complement of the first so that repeated
//! eigenvalues still give an orthonormal frame.

use super::symmatrix::SymMatrix;

/// Eigenvalues in ascending order and the matching unit eigenvectors
/// (`vectors[k]` pairs with `values[k]`; unused slots are zero).
#[derive(Clone, Copy, Debug)]
pub struct SpectralDecomposition {
    pub n: usize,
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

impl SpectralDecomposition {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.n]
    }

    /// Rebuilds `sum_k f_k v_k v_k^T`.
    pub fn reassemble(&self, values: &[f64]) -> SymMatrix {
        SymMatrix::from_spectral(&values[..self.n], &self.vectors)
    }

    /// Components of `m` in the eigenframe, `V^T m V`.
    pub fn rotate_into(&self, m: &SymMatrix) -> [[f64; 3]; 3] {
        let a = m.to_full();
        let n = self.n;
        let mut out = [[0.0; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        s += self.vectors[i][k] * a[k][l] * self.vectors[j][l];
                    }
                }
                out[i][j] = s;
            }
        }
        out
    }
}

pub fn symmetric_eigen(m: &SymMatrix) -> SpectralDecomposition {
    match m.dim() {
        1 => SpectralDecomposition {
            n: 1,
            values: [m.get(0, 0), 0.0, 0.0],
            vectors: [[1.0, 0.0, 0.0], [0.0; 3], [0.0; 3]],
        },
        2 => eigen2(m.get(0, 0), m.get(0, 1), m.get(1, 1)),
        _ => eigen3(m),
    }
}

fn eigen2(a: f64, b: f64, c: f64) -> SpectralDecomposition {
    let mean = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    let radius = half_diff.hypot(b);
    // Rotation angle of the eigenframe; atan2 stays well defined for b = 0.
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (s, co) = theta.sin_cos();
    // (co, s) pairs with mean + radius.
    SpectralDecomposition {
        n: 2,
        values: [mean - radius, mean + radius, 0.0],
        vectors: [[-s, co, 0.0], [co, s, 0.0], [0.0; 3]],
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn normalize3(a: [f64; 3]) -> [f64; 3] {
    let len = dot3(a, a).sqrt();
    scale3(a, 1.0 / len)
}

fn orthogonal_complement(w: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let u = if w[0].abs() > w[1].abs() {
        let inv = 1.0 / (w[0] * w[0] + w[2] * w[2]).sqrt();
        [-w[2] * inv, 0.0, w[0] * inv]
    } else {
        let inv = 1.0 / (w[1] * w[1] + w[2] * w[2]).sqrt();
        [0.0, w[2] * inv, -w[1] * inv]
    };
    (u, cross(w, u))
}

fn first_eigenvector(a: &[[f64; 3]; 3], eval: f64) -> [f64; 3] {
    let r0 = [a[0][0] - eval, a[0][1], a[0][2]];
    let r1 = [a[0][1], a[1][1] - eval, a[1][2]];
    let r2 = [a[0][2], a[1][2], a[2][2] - eval];
    let c01 = cross(r0, r1);
    let c02 = cross(r0, r2);
    let c12 = cross(r1, r2);
    let d01 = dot3(c01, c01);
    let d02 = dot3(c02, c02);
    let d12 = dot3(c12, c12);
    let (best, dmax) = if d01 >= d02 && d01 >= d12 {
        (c01, d01)
    } else if d02 >= d12 {
        (c02, d02)
    } else {
        (c12, d12)
    };
    if dmax > 0.0 {
        scale3(best, 1.0 / dmax.sqrt())
    } else {
        // A - eval*Id vanishes: every direction is an eigenvector.
        [1.0, 0.0, 0.0]
    }
}

fn second_eigenvector(a: &[[f64; 3]; 3], evec0: [f64; 3], eval1: f64) -> [f64; 3] {
    let (u, v) = orthogonal_complement(evec0);
    let mul = |x: [f64; 3]| -> [f64; 3] {
        [dot3(a[0], x), dot3(a[1], x), dot3(a[2], x)]
    };
    let au = mul(u);
    let av = mul(v);
    let mut m00 = dot3(u, au) - eval1;
    let mut m01 = dot3(u, av);
    let mut m11 = dot3(v, av) - eval1;
    let (abs00, abs01, abs11) = (m00.abs(), m01.abs(), m11.abs());
    if abs00 >= abs11 {
        if abs00.max(abs01) > 0.0 {
            if abs00 >= abs01 {
                m01 /= m00;
                m00 = 1.0 / (1.0 + m01 * m01).sqrt();
                m01 *= m00;
            } else {
                m00 /= m01;
                m01 = 1.0 / (1.0 + m00 * m00).sqrt();
                m00 *= m01;
            }
            [m01 * u[0] - m00 * v[0], m01 * u[1] - m00 * v[1], m01 * u[2] - m00 * v[2]]
        } else {
            u
        }
    } else if abs11.max(abs01) > 0.0 {
        if abs11 >= abs01 {
            m01 /= m11;
            m11 = 1.0 / (1.0 + m01 * m01).sqrt();
            m01 *= m11;
        } else {
            m11 /= m01;
            m01 = 1.0 / (1.0 + m11 * m11).sqrt();
            m11 *= m01;
        }
        [m11 * u[0] - m01 * v[0], m11 * u[1] - m01 * v[1], m11 * u[2] - m01 * v[2]]
    } else {
        u
    }
}

fn eigen3(m: &SymMatrix) -> SpectralDecomposition {
    let scale = m.max_abs();
    if scale == 0.0 {
        return SpectralDecomposition {
            n: 3,
            values: [0.0; 3],
            vectors: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        };
    }
    let inv = 1.0 / scale;
    let mut a = m.to_full();
    for row in a.iter_mut() {
        for e in row.iter_mut() {
            *e *= inv;
        }
    }
    let norm_off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let (mut values, vectors);
    if norm_off > 0.0 {
        let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
        let b00 = a[0][0] - q;
        let b11 = a[1][1] - q;
        let b22 = a[2][2] - q;
        let p = ((b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * norm_off) / 6.0).sqrt();
        let c00 = b11 * b22 - a[1][2] * a[1][2];
        let c01 = a[0][1] * b22 - a[1][2] * a[0][2];
        let c02 = a[0][1] * a[1][2] - b11 * a[0][2];
        let det = (b00 * c00 - a[0][1] * c01 + a[0][2] * c02) / (p * p * p);
        let half_det = (0.5 * det).clamp(-1.0, 1.0);
        let angle = half_det.acos() / 3.0;
        let two_thirds_pi = 2.0 * std::f64::consts::FRAC_PI_3;
        let beta2 = 2.0 * angle.cos();
        let beta0 = 2.0 * (angle + two_thirds_pi).cos();
        let beta1 = -(beta0 + beta2);
        values = [q + p * beta0, q + p * beta1, q + p * beta2];
        let mut vecs = [[0.0; 3]; 3];
        if half_det >= 0.0 {
            vecs[2] = first_eigenvector(&a, values[2]);
            vecs[1] = second_eigenvector(&a, vecs[2], values[1]);
            vecs[0] = normalize3(cross(vecs[1], vecs[2]));
        } else {
            vecs[0] = first_eigenvector(&a, values[0]);
            vecs[1] = second_eigenvector(&a, vecs[0], values[1]);
            vecs[2] = normalize3(cross(vecs[0], vecs[1]));
        }
        vectors = vecs;
    } else {
        values = [a[0][0], a[1][1], a[2][2]];
        vectors = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    for v in values.iter_mut() {
        *v *= scale;
    }
    sort_ascending(values, vectors, 3)
}

fn sort_ascending(values: [f64; 3], vectors: [[f64; 3]; 3], n: usize) -> SpectralDecomposition {
    let mut idx = [0usize, 1, 2];
    idx[..n].sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut out = SpectralDecomposition { n, values: [0.0; 3], vectors: [[0.0; 3]; 3] };
    for (k, &i) in idx[..n].iter().enumerate() {
        out.values[k] = values[i];
        out.vectors[k] = vectors[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_decomposition(m: &SymMatrix, tol: f64) {
        let dec = symmetric_eigen(m);
        let back = dec.reassemble(&dec.values);
        let err = (back - *m).max_abs();
        assert!(err <= tol * (1.0 + m.max_abs()), "reassembly error {err} for {m:?}");
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let d = dot3(dec.vectors[i], dec.vectors[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-12, "frame not orthonormal: {d}");
            }
        }
        for w in dec.values().windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn random_matrices_match_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let e: Vec<f64> = (0..6).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let m = SymMatrix::from_upper(3, &e);
            check_decomposition(&m, 1e-13);
            let full = m.to_full();
            let na = Matrix3::from_fn(|i, j| full[i][j]);
            let mut reference: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            let dec = symmetric_eigen(&m);
            for (a, b) in dec.values().iter().zip(reference) {
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
            }
            let m2 = SymMatrix::from_upper(2, &e[..3]);
            check_decomposition(&m2, 1e-14);
        }
    }

    #[test]
    fn repeated_eigenvalues_keep_an_orthonormal_frame() {
        check_decomposition(&SymMatrix::from_diag(&[1.0, 1.0, -2.0]), 1e-14);
        check_decomposition(&SymMatrix::identity(3), 1e-14);
        check_decomposition(&SymMatrix::zeros(3), 1e-14);
        // Rotated double eigenvalue.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [[s, s, 0.0], [-s, s, 0.0], [0.0, 0.0, 1.0]];
        let m = SymMatrix::from_spectral(&[2.0, 2.0, -1.0], &v);
        check_decomposition(&m, 1e-14);
        let m = SymMatrix::from_spectral(&[2.0, 2.0 + 1e-13, -1.0], &v);
        check_decomposition(&m, 1e-13);
        check_decomposition(&SymMatrix::from_diag(&[3.0, 3.0]), 1e-15);
    }
}
