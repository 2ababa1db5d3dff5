//! Tucker decompositions: truncated HOSVD, HOOI refinement, reconstruction and
//! the loss quantities used to judge a core shape.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{top_left_singular_vectors, ModeSpectra};
use crate::tensor::{DenseTensor, Matrix};

/// Multilinear rank `(R_1, …, R_N)` of a Tucker core.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoreShape(pub Vec<usize>);

impl CoreShape {
    pub fn ones(order: usize) -> Self {
        CoreShape(vec![1; order])
    }

    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Checks `1 ≤ R_n ≤ I_n` for every mode.
    pub fn validate(&self, dims: &[usize]) -> Result<()> {
        if self.0.len() != dims.len() {
            return Err(Error::InvalidRank(format!(
                "core shape {self} has order {}, tensor has order {}",
                self.0.len(),
                dims.len()
            )));
        }
        for (n, (&r, &d)) in self.0.iter().zip(dims).enumerate() {
            if r == 0 || r > d {
                return Err(Error::InvalidRank(format!(
                    "rank {r} on mode {n} is outside [1, {d}]"
                )));
            }
        }
        Ok(())
    }

    /// `∏ R_n + Σ I_n R_n`, saturating.
    pub fn tucker_size(&self, dims: &[usize]) -> u128 {
        tucker_cost(dims, &self.0)
    }
}

impl fmt::Display for CoreShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// Number of stored entries of a Tucker decomposition, `∏R_n + Σ I_n R_n`,
/// computed in saturating integer arithmetic.
pub fn tucker_cost(dims: &[usize], ranks: &[usize]) -> u128 {
    let core = ranks
        .iter()
        .fold(1u128, |acc, &r| acc.saturating_mul(r as u128));
    let factors = dims
        .iter()
        .zip(ranks)
        .fold(0u128, |acc, (&i, &r)| acc.saturating_add((i as u128) * (r as u128)));
    core.saturating_add(factors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuckerDecomposition {
    pub core: DenseTensor,
    /// Factor `n` is `I_n × R_n`.
    pub factors: Vec<Matrix>,
}

impl TuckerDecomposition {
    pub fn core_shape(&self) -> CoreShape {
        CoreShape(self.core.shape().to_vec())
    }

    pub fn tensor_shape(&self) -> Vec<usize> {
        self.factors.iter().map(Matrix::rows).collect()
    }

    pub fn size(&self) -> u128 {
        tucker_cost(&self.tensor_shape(), self.core.shape())
    }

    fn check_consistent(&self) -> Result<()> {
        if self.factors.len() != self.core.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} factors for an order-{} core",
                self.factors.len(),
                self.core.order()
            )));
        }
        for (n, f) in self.factors.iter().enumerate() {
            if f.cols() != self.core.shape()[n] {
                return Err(Error::DimensionMismatch(format!(
                    "factor {n} has {} columns, core mode has size {}",
                    f.cols(),
                    self.core.shape()[n]
                )));
            }
        }
        Ok(())
    }
}

/// `X ×_1 A1ᵀ ⋯ ×_N ANᵀ`.
fn project(x: &DenseTensor, factors: &[Matrix]) -> Result<DenseTensor> {
    let mut g = x.clone();
    for (n, a) in factors.iter().enumerate() {
        g = g.mode_product(n, &a.transpose())?;
    }
    Ok(g)
}

/// Truncated HOSVD: each factor holds the top `R_n` left singular vectors of
/// the mode-`n` unfolding and the core is the projection of `X` onto them.
pub fn tucker_hosvd(x: &DenseTensor, r: &CoreShape) -> Result<TuckerDecomposition> {
    r.validate(x.shape())?;
    let factors = (0..x.order())
        .map(|n| top_left_singular_vectors(&x.unfold(n)?.matrix, r.0[n]))
        .collect::<Result<Vec<_>>>()?;
    let core = project(x, &factors)?;
    Ok(TuckerDecomposition { core, factors })
}

pub fn reconstruct(d: &TuckerDecomposition) -> Result<DenseTensor> {
    d.check_consistent()?;
    let mut x = d.core.clone();
    for (n, a) in d.factors.iter().enumerate() {
        x = x.mode_product(n, a)?;
    }
    Ok(x)
}

/// Higher-order orthogonal iteration. Starts from `init` (HOSVD when `None`)
/// and runs `iters` full sweeps, updating modes in ascending order.
pub fn hooi(
    x: &DenseTensor,
    r: &CoreShape,
    iters: usize,
    init: Option<&TuckerDecomposition>,
) -> Result<TuckerDecomposition> {
    hooi_impl(x, r, iters, init, false).map(|(d, _)| d)
}

/// Same as [`hooi`] but also returns `‖X − X̂‖_F²` after every sweep.
pub fn hooi_with_trace(
    x: &DenseTensor,
    r: &CoreShape,
    iters: usize,
    init: Option<&TuckerDecomposition>,
) -> Result<(TuckerDecomposition, Vec<f64>)> {
    hooi_impl(x, r, iters, init, true)
}

fn hooi_impl(
    x: &DenseTensor,
    r: &CoreShape,
    iters: usize,
    init: Option<&TuckerDecomposition>,
    trace: bool,
) -> Result<(TuckerDecomposition, Vec<f64>)> {
    r.validate(x.shape())?;
    let start = match init {
        Some(d) => {
            d.check_consistent()?;
            if d.tensor_shape() != x.shape() || d.core_shape() != *r {
                return Err(Error::DimensionMismatch(format!(
                    "initial decomposition {} of {:?} does not match shape {r} of {:?}",
                    d.core_shape(),
                    d.tensor_shape(),
                    x.shape()
                )));
            }
            d.clone()
        }
        None => tucker_hosvd(x, r)?,
    };
    if iters == 0 {
        return Ok((start, Vec::new()));
    }

    let mut factors = start.factors;
    let mut losses = Vec::with_capacity(if trace { iters } else { 0 });
    for _ in 0..iters {
        for n in 0..x.order() {
            let mut y = x.clone();
            for (m, a) in factors.iter().enumerate() {
                if m != n {
                    y = y.mode_product(m, &a.transpose())?;
                }
            }
            factors[n] = top_left_singular_vectors(&y.unfold(n)?.matrix, r.0[n])?;
        }
        if trace {
            let d = TuckerDecomposition {
                core: project(x, &factors)?,
                factors: factors.clone(),
            };
            losses.push(loss(x, &d)?);
        }
    }
    let core = project(x, &factors)?;
    Ok((TuckerDecomposition { core, factors }, losses))
}

/// `‖X − reconstruct(D)‖_F²`.
pub fn loss(x: &DenseTensor, d: &TuckerDecomposition) -> Result<f64> {
    let xh = reconstruct(d)?;
    Ok(x.sub(&xh)?.fro_norm_sq())
}

/// Relative reconstruction error `loss / ‖X‖_F²`; zero for the zero tensor.
pub fn rre(x: &DenseTensor, d: &TuckerDecomposition) -> Result<f64> {
    let total = x.fro_norm_sq();
    let l = loss(x, d)?;
    Ok(if total == 0.0 { 0.0 } else { l / total })
}

/// `Σ_n Σ_{i > R_n} σ_i^{(n)2}`: the discarded spectral energy summed over modes.
pub fn surrogate_loss(spectra: &ModeSpectra, r: &CoreShape) -> Result<f64> {
    r.validate(&spectra.dims())?;
    Ok(spectra
        .sq_singular_values
        .iter()
        .zip(&r.0)
        .map(|(vals, &rank)| vals[rank..].iter().sum::<f64>())
        .sum())
}

/// Largest single-mode tail, a lower bound on the loss of any Tucker
/// decomposition with core shape `r`.
pub fn max_mode_tail(spectra: &ModeSpectra, r: &CoreShape) -> Result<f64> {
    r.validate(&spectra.dims())?;
    Ok(spectra
        .sq_singular_values
        .iter()
        .zip(&r.0)
        .map(|(vals, &rank)| vals[rank..].iter().sum::<f64>())
        .fold(0.0, f64::max))
}
