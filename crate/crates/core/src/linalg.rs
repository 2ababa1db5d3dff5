//! Small dense linear algebra kernels: Gram matrices, a cyclic Jacobi
//! symmetric eigensolver, and column orthonormalization.

use crate::tensor::Matrix;

/// Off-diagonal convergence threshold, relative to `‖A‖_F`.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// `M Mᵀ`.
pub fn gram_rows(m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        let ri = m.row(i);
        for j in i..n {
            let v: f64 = ri.iter().zip(m.row(j)).map(|(a, b)| a * b).sum();
            g.set(i, j, v);
            g.set(j, i, v);
        }
    }
    g
}

/// `Mᵀ M`.
pub fn gram_cols(m: &Matrix) -> Matrix {
    let n = m.cols();
    let mut acc = vec![0.0; n * n];
    for i in 0..m.rows() {
        let r = m.row(i);
        for a in 0..n {
            let ra = r[a];
            if ra == 0.0 {
                continue;
            }
            let dst = &mut acc[a * n + a..(a + 1) * n];
            for (d, &rb) in dst.iter_mut().zip(&r[a..]) {
                *d += ra * rb;
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            acc[a * n + b] = acc[b * n + a];
        }
    }
    Matrix::new(n, n, acc).expect("square gram")
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues, non-increasing.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: Matrix,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigensolver. Stops once `off(A) ≤ JACOBI_TOL·‖A‖_F` or after
/// `JACOBI_MAX_SWEEPS` sweeps.
pub fn sym_eigen(a: &Matrix) -> SymEigen {
    assert_eq!(a.rows(), a.cols(), "sym_eigen needs a square matrix");
    let n = a.rows();
    let mut m: Vec<f64> = a.data().to_vec();
    let mut v = Matrix::identity(n).into_data();
    let total = a.fro_norm();
    let threshold = JACOBI_TOL * total;

    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while sweeps < JACOBI_MAX_SWEEPS && total > 0.0 && off(&m) > threshold {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // A ← Jᵀ A J on rows/cols p and q
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their original column order
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(k, dst, v[k * n + src]);
        }
    }
    SymEigen {
        values,
        vectors,
        sweeps,
    }
}

/// Flips each column so its largest-magnitude entry is positive (first such
/// entry on ties).
pub fn canonicalize_signs(m: &mut Matrix) {
    for j in 0..m.cols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for i in 0..m.rows() {
            let a = m.get(i, j).abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if m.get(best, j) < 0.0 {
            for i in 0..m.rows() {
                m.set(i, j, -m.get(i, j));
            }
        }
    }
}

/// Orthonormalizes the given columns with two passes of modified Gram–Schmidt,
/// dropping numerically dependent ones, then completes the basis up to `k`
/// columns using standard basis vectors.
pub fn orthonormal_completion(columns: &[Vec<f64>], rows: usize, k: usize) -> Matrix {
    assert!(k <= rows, "cannot fit {k} orthonormal columns in dimension {rows}");
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let push = |basis: &mut Vec<Vec<f64>>, mut v: Vec<f64>| {
        let n0 = norm(&v);
        if n0 == 0.0 {
            return;
        }
        for _ in 0..2 {
            for b in basis.iter() {
                let d = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= d * bi;
                }
            }
        }
        let n1 = norm(&v);
        if n1 > 1e-10 * n0 {
            v.iter_mut().for_each(|x| *x /= n1);
            basis.push(v);
        }
    };
    for c in columns {
        if basis.len() == k {
            break;
        }
        push(&mut basis, c.clone());
    }
    let mut e = 0;
    while basis.len() < k && e < rows {
        let mut v = vec![0.0; rows];
        v[e] = 1.0;
        push(&mut basis, v);
        e += 1;
    }
    let mut out = Matrix::zeros(rows, k);
    for (j, b) in basis.iter().enumerate() {
        for (i, &x) in b.iter().enumerate() {
            out.set(i, j, x);
        }
    }
    out
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes_small_symmetric() {
        let a = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = sym_eigen(&a);
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        // A v = λ v
        for j in 0..2 {
            let v = e.vectors.column(j);
            for i in 0..2 {
                let av: f64 = (0..2).map(|k| a.get(i, k) * v[k]).sum();
                assert!((av - e.values[j] * v[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_zero_matrix() {
        let e = sym_eigen(&Matrix::zeros(3, 3));
        assert_eq!(e.values, vec![0.0; 3]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn grams_agree_with_matmul() {
        let m = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        assert_eq!(gram_rows(&m), m.matmul(&m.transpose()).unwrap());
        assert_eq!(gram_cols(&m), m.transpose().matmul(&m).unwrap());
    }

    #[test]
    fn completion_fills_with_standard_basis() {
        let q = orthonormal_completion(&[vec![0.0, 1.0, 0.0]], 3, 3);
        assert_eq!(q.column(0), vec![0.0, 1.0, 0.0]);
        assert_eq!(q.column(1), vec![1.0, 0.0, 0.0]);
        assert_eq!(q.column(2), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn sign_rule_prefers_first_max() {
        let mut m = Matrix::from_rows(&[&[-1.0], &[1.0]]);
        canonicalize_signs(&mut m);
        assert_eq!(m.column(0), vec![1.0, -1.0]);
    }
}
