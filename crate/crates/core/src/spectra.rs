//! Squared singular values and leading left singular vectors of unfoldings.
//!
//! Everything is computed through a Gram matrix on the shorter side of the
//! unfolding followed by a Jacobi eigendecomposition. Negative eigenvalues
//! produced by roundoff are clamped to zero.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{canonicalize_signs, gram_cols, gram_rows, orthonormal_completion, sym_eigen};
use crate::tensor::{DenseTensor, Matrix};

/// Per-mode squared singular values of every unfolding of a tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectra {
    /// `sq_singular_values[n]` has length `I_n` and is non-increasing.
    pub sq_singular_values: Vec<Vec<f64>>,
    pub tensor_fro_sq: f64,
}

impl ModeSpectra {
    pub fn order(&self) -> usize {
        self.sq_singular_values.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sq_singular_values.iter().map(Vec::len).collect()
    }
}

/// Squared singular values of a matrix, non-increasing, length `min(rows, cols)`.
pub fn matrix_sq_singular_values(m: &Matrix) -> Vec<f64> {
    let gram = if m.rows() <= m.cols() {
        gram_rows(m)
    } else {
        gram_cols(m)
    };
    sym_eigen(&gram).values.into_iter().map(|v| v.max(0.0)).collect()
}

pub fn mode_sq_singular_values(x: &DenseTensor) -> ModeSpectra {
    let sq_singular_values = (0..x.order())
        .into_par_iter()
        .map(|n| {
            let u = x.unfold(n).expect("mode in range");
            let mut vals = matrix_sq_singular_values(&u.matrix);
            vals.resize(x.shape()[n], 0.0);
            vals
        })
        .collect();
    ModeSpectra {
        sq_singular_values,
        tensor_fro_sq: x.fro_norm_sq(),
    }
}

/// Squared singular values of `X_(S)`, length `min(P, Q)`.
pub fn subset_sq_singular_values(x: &DenseTensor, subset: &[usize]) -> Result<Vec<f64>> {
    let u = x.matricize(subset)?;
    Ok(matrix_sq_singular_values(&u.matrix))
}

/// Orthonormal `rows × k` basis of the dominant `k`-dimensional left singular
/// subspace, columns by non-increasing singular value. Each column's
/// largest-magnitude entry is made positive (lowest row index on ties).
pub fn top_left_singular_vectors(m: &Matrix, k: usize) -> Result<Matrix> {
    if k == 0 || k > m.rows() {
        return Err(Error::InvalidRank(format!(
            "requested {k} singular vectors of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let mut u = if m.rows() <= m.cols() {
        sym_eigen(&gram_rows(m)).vectors.leading_columns(k)
    } else {
        // Right singular vectors from the smaller Gram, mapped back via u = M v / σ.
        let eig = sym_eigen(&gram_cols(m));
        let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
        let mut cols = Vec::with_capacity(k);
        for (j, &lam) in eig.values.iter().enumerate().take(k) {
            if lam <= 1e-24 * top || lam <= 0.0 {
                break;
            }
            let v = eig.vectors.column(j);
            let sigma = lam.sqrt();
            let u: Vec<f64> = (0..m.rows())
                .map(|i| m.row(i).iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / sigma)
                .collect();
            cols.push(u);
        }
        orthonormal_completion(&cols, m.rows(), k)
    };
    canonicalize_signs(&mut u);
    Ok(u)
}
