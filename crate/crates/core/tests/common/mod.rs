#![allow(dead_code)]

use coreshape::tensor::{DenseTensor, Matrix};
use coreshape::PackingInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random non-increasing nonnegative list.
pub fn decreasing_values(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * 10.0).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Random instance with `order` modes of size ≤ `max_dim` and a budget drawn
/// between the minimum cost and the full-shape cost.
pub fn random_instance(rng: &mut ChaCha8Rng, max_order: usize, max_dim: usize) -> PackingInstance {
    let order = rng.random_range(1..=max_order);
    let dims: Vec<usize> = (0..order).map(|_| rng.random_range(1..=max_dim)).collect();
    let values = dims.iter().map(|&d| decreasing_values(rng, d)).collect();
    let min = 1 + dims.iter().sum::<usize>() as u64;
    let full = dims.iter().product::<usize>() as u64 + dims.iter().map(|d| d * d).sum::<usize>() as u64;
    let budget = rng.random_range(min..=full.max(min));
    PackingInstance::new(dims, values, budget).unwrap()
}

/// Every tuple in `[1, caps[0]] × ⋯`, lexicographic.
pub fn all_shapes(caps: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut r = vec![1usize; caps.len()];
    loop {
        out.push(r.clone());
        let mut m = caps.len();
        loop {
            if m == 0 {
                return out;
            }
            m -= 1;
            r[m] += 1;
            if r[m] <= caps[m] {
                break;
            }
            r[m] = 1;
        }
    }
}

pub fn core_size(r: &[usize]) -> u128 {
    r.iter().map(|&x| x as u128).product()
}

pub fn full_cost(dims: &[usize], r: &[usize]) -> u128 {
    core_size(r) + dims.iter().zip(r).map(|(&d, &x)| (d * x) as u128).sum::<u128>()
}

/// Objective recomputed from raw values, independent of the stored prefix sums.
pub fn raw_objective(values: &[Vec<f64>], r: &[usize]) -> f64 {
    values
        .iter()
        .zip(r)
        .map(|(v, &k)| v[..k].iter().sum::<f64>())
        .sum()
}

/// Best objective over all shapes satisfying `keep`, by plain enumeration.
pub fn exhaustive_best(inst: &PackingInstance, keep: impl Fn(&[usize]) -> bool) -> f64 {
    all_shapes(&inst.max_ranks())
        .into_iter()
        .filter(|r| keep(r))
        .map(|r| raw_objective(inst.values(), &r))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn to_nalgebra(m: &Matrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

/// Squared singular values from nalgebra's SVD, non-increasing.
pub fn oracle_sq_singular_values(m: &Matrix) -> Vec<f64> {
    let svd = to_nalgebra(m).svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().map(|v| v * v).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> DenseTensor {
    let n = shape.iter().product();
    DenseTensor::new(shape.to_vec(), (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()).unwrap()
}
