//! Dense row-major tensors and the multilinear primitives built on them.
//!
//! Layout convention: the last index varies fastest. The mode-`n` unfolding
//! places `i_n` on the rows and orders columns lexicographically by the
//! remaining indices, earlier modes most significant. [`DenseTensor::matricize`]
//! applies the same rule to an arbitrary row subset, so `matricize(&[n])` and
//! `unfold(n)` produce identical matrices.
//!
//! Modes are 0-based throughout the library.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("matrix {rows}x{cols} is empty")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from nested rows. Panics on ragged input; intended for tests and literals.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix add".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn fro_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.fro_norm_sq().sqrt()
    }

    /// Keeps the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        let k = k.min(self.cols);
        let mut out = Matrix::zeros(self.rows, k);
        for i in 0..self.rows {
            out.data[i * k..(i + 1) * k].copy_from_slice(&self.data[i * self.cols..i * self.cols + k]);
        }
        out
    }
}

/// A matricization together with the modes that were mapped to its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Unfolded {
    pub matrix: Matrix,
    pub row_modes: Vec<usize>,
}

/// Order-N dense real tensor, row-major with the last index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        validate_shape(&shape)?;
        let expected = checked_numel(&shape)?;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "shape {shape:?} needs {expected} entries, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        validate_shape(&shape)?;
        let n = checked_numel(&shape)?;
        Ok(Self {
            shape,
            data: vec![0.0; n],
        })
    }

    /// Outer product of vectors, `u ∘ v ∘ …`.
    pub fn outer(vectors: &[&[f64]]) -> Result<Self> {
        let shape: Vec<usize> = vectors.iter().map(|v| v.len()).collect();
        let mut t = Self::zeros(shape)?;
        let mut idx = vec![0usize; vectors.len()];
        for slot in t.data.iter_mut() {
            *slot = idx.iter().zip(vectors).map(|(&i, v)| v[i]).product();
            increment(&mut idx, &t.shape);
        }
        Ok(t)
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        Self {
            shape: vec![m.rows, m.cols],
            data: m.data.clone(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        let mut flat = 0;
        for (&i, &d) in index.iter().zip(&self.shape) {
            flat = flat * d + i;
        }
        self.data[flat]
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(Error::ModeOutOfRange {
                mode,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// (product of dims before `mode`, dim at `mode`, product of dims after `mode`).
    fn split_at_mode(&self, mode: usize) -> (usize, usize, usize) {
        let left = self.shape[..mode].iter().product();
        let right = self.shape[mode + 1..].iter().product();
        (left, self.shape[mode], right)
    }

    /// Mode-`mode` unfolding: `I_n × ∏_{m≠n} I_m`, columns are mode-`n` fibers.
    pub fn unfold(&self, mode: usize) -> Result<Unfolded> {
        self.check_mode(mode)?;
        let (left, dim, right) = self.split_at_mode(mode);
        let cols = left * right;
        let mut out = vec![0.0; self.data.len()];
        for l in 0..left {
            for i in 0..dim {
                let src = &self.data[(l * dim + i) * right..(l * dim + i + 1) * right];
                out[i * cols + l * right..i * cols + (l + 1) * right].copy_from_slice(src);
            }
        }
        Ok(Unfolded {
            matrix: Matrix {
                rows: dim,
                cols,
                data: out,
            },
            row_modes: vec![mode],
        })
    }

    /// Inverse of [`DenseTensor::unfold`].
    pub fn fold(m: &Matrix, mode: usize, shape: &[usize]) -> Result<Self> {
        validate_shape(shape)?;
        if mode >= shape.len() {
            return Err(Error::ModeOutOfRange {
                mode,
                order: shape.len(),
            });
        }
        let left: usize = shape[..mode].iter().product();
        let right: usize = shape[mode + 1..].iter().product();
        let dim = shape[mode];
        if m.rows != dim || m.cols != left * right {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot fold into mode {mode} of {shape:?}",
                m.rows, m.cols
            )));
        }
        let cols = m.cols;
        let mut data = vec![0.0; m.data.len()];
        for l in 0..left {
            for i in 0..dim {
                data[(l * dim + i) * right..(l * dim + i + 1) * right]
                    .copy_from_slice(&m.data[i * cols + l * right..i * cols + (l + 1) * right]);
            }
        }
        Ok(Self {
            shape: shape.to_vec(),
            data,
        })
    }

    /// Matricization `X_(S)`: rows indexed by the modes in `subset` (ascending),
    /// columns by the complement, both lexicographic with earlier modes most significant.
    pub fn matricize(&self, subset: &[usize]) -> Result<Unfolded> {
        let n = self.order();
        let mut in_rows = vec![false; n];
        for &m in subset {
            if m >= n {
                return Err(Error::ModeOutOfRange { mode: m, order: n });
            }
            if in_rows[m] {
                return Err(Error::InvalidSubset(format!("mode {m} repeated")));
            }
            in_rows[m] = true;
        }
        if subset.is_empty() || subset.len() == n {
            return Err(Error::InvalidSubset(format!(
                "subset must be nonempty and proper, got {} of {n} modes",
                subset.len()
            )));
        }

        // Strides of each mode within the row (resp. column) index.
        let mut row_stride = vec![0usize; n];
        let mut col_stride = vec![0usize; n];
        let (mut rs, mut cs) = (1usize, 1usize);
        for m in (0..n).rev() {
            if in_rows[m] {
                row_stride[m] = rs;
                rs *= self.shape[m];
            } else {
                col_stride[m] = cs;
                cs *= self.shape[m];
            }
        }
        let (rows, cols) = (rs, cs);

        let mut out = vec![0.0; self.data.len()];
        let mut idx = vec![0usize; n];
        let (mut r, mut c) = (0usize, 0usize);
        for &v in &self.data {
            out[r * cols + c] = v;
            // odometer increment, tracking row/col offsets incrementally
            for m in (0..n).rev() {
                idx[m] += 1;
                r += row_stride[m];
                c += col_stride[m];
                if idx[m] < self.shape[m] {
                    break;
                }
                r -= row_stride[m] * idx[m];
                c -= col_stride[m] * idx[m];
                idx[m] = 0;
            }
        }
        let mut row_modes: Vec<usize> = subset.to_vec();
        row_modes.sort_unstable();
        Ok(Unfolded {
            matrix: Matrix {
                rows,
                cols,
                data: out,
            },
            row_modes,
        })
    }

    /// n-mode product `X ×_n A` with `A` of shape `J × I_n`.
    pub fn mode_product(&self, mode: usize, a: &Matrix) -> Result<Self> {
        self.check_mode(mode)?;
        let (left, dim, right) = self.split_at_mode(mode);
        if a.cols != dim {
            return Err(Error::DimensionMismatch(format!(
                "mode {mode} has size {dim} but the matrix has {} columns",
                a.cols
            )));
        }
        let j_dim = a.rows;
        let mut out = vec![0.0; left * j_dim * right];
        for l in 0..left {
            let src = &self.data[l * dim * right..(l + 1) * dim * right];
            let dst = &mut out[l * j_dim * right..(l + 1) * j_dim * right];
            for j in 0..j_dim {
                let dst_row = &mut dst[j * right..(j + 1) * right];
                for i in 0..dim {
                    let w = a.data[j * dim + i];
                    if w == 0.0 {
                        continue;
                    }
                    for (o, &x) in dst_row.iter_mut().zip(&src[i * right..(i + 1) * right]) {
                        *o += w * x;
                    }
                }
            }
        }
        let mut shape = self.shape.clone();
        shape[mode] = j_dim;
        Ok(Self { shape, data: out })
    }

    pub fn inner(&self, other: &DenseTensor) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch(format!(
                "inner product of {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn fro_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.fro_norm_sq().sqrt()
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    fn zip_with(&self, other: &DenseTensor, f: impl Fn(f64, f64) -> f64) -> Result<DenseTensor> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }
}

fn validate_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() {
        return Err(Error::InvalidShape("tensor must have at least one mode".into()));
    }
    if let Some(m) = shape.iter().position(|&d| d == 0) {
        return Err(Error::InvalidShape(format!("mode {m} has size 0")));
    }
    Ok(())
}

fn checked_numel(shape: &[usize]) -> Result<usize> {
    shape
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidShape(format!("{shape:?} overflows usize")))
}

fn increment(idx: &mut [usize], shape: &[usize]) {
    for m in (0..idx.len()).rev() {
        idx[m] += 1;
        if idx[m] < shape[m] {
            return;
        }
        idx[m] = 0;
    }
}
