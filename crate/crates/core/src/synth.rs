//! Seeded synthetic tensors with a prescribed multilinear rank.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::orthonormal_completion;
use crate::tensor::{DenseTensor, Matrix};

/// `G ×_1 A1 ⋯ ×_N AN + σ·‖signal‖·Z/‖Z‖` with Gaussian `G`, `Z` and
/// orthonormal factors obtained by orthonormalizing Gaussian matrices.
pub fn gen_synthetic(
    shape: &[usize],
    core_shape: &[usize],
    noise_level: f64,
    seed: u64,
) -> Result<DenseTensor> {
    if shape.len() != core_shape.len() {
        return Err(Error::DimensionMismatch(format!(
            "core shape {core_shape:?} has a different order than {shape:?}"
        )));
    }
    if let Some(n) = (0..shape.len()).find(|&n| core_shape[n] == 0 || core_shape[n] > shape[n]) {
        return Err(Error::InvalidRank(format!(
            "core size {} on mode {n} must lie in [1, {}]",
            core_shape[n], shape[n]
        )));
    }
    if !(noise_level >= 0.0 && noise_level.is_finite()) {
        return Err(Error::InvalidInstance(format!("noise level {noise_level} must be ≥ 0")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core_len: usize = core_shape.iter().product();
    let core = DenseTensor::new(core_shape.to_vec(), gaussian(&mut rng, core_len))?;

    let mut signal = core;
    for (n, (&dim, &rank)) in shape.iter().zip(core_shape).enumerate() {
        let raw: Vec<Vec<f64>> = (0..rank).map(|_| gaussian(&mut rng, dim)).collect();
        let factor = orthonormal_completion(&raw, dim, rank);
        signal = signal.mode_product(n, &factor)?;
    }

    if noise_level == 0.0 {
        return Ok(signal);
    }
    let z = DenseTensor::new(shape.to_vec(), gaussian(&mut rng, signal.numel()))?;
    let zn = z.fro_norm();
    if zn == 0.0 {
        return Ok(signal);
    }
    signal.add(&z.scale(noise_level * signal.fro_norm() / zn))
}

/// Tensor of i.i.d. standard normal entries.
pub fn gaussian_tensor(shape: &[usize], seed: u64) -> Result<DenseTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.iter().product();
    DenseTensor::new(shape.to_vec(), gaussian(&mut rng, n))
}

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::new(rows, cols, gaussian(&mut rng, rows * cols)).expect("nonempty")
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}
