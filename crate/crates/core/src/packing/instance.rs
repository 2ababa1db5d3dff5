use serde::{Deserialize, Serialize};

use crate::decomp::tucker_cost;
use crate::error::{Error, Result};
use crate::spectra::ModeSpectra;

/// Relative slack for monotonicity/sign violations accepted by [`PackingInstance::new`].
const LOAD_SLACK: f64 = 1e-12;

/// A Tucker packing instance.
///
/// `values[n]` may be shorter than `dims[n]`: its length is the largest rank
/// allowed on mode `n`, while `dims[n]` still enters the factor cost.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingInstance {
    dims: Vec<usize>,
    values: Vec<Vec<f64>>,
    /// `prefix[n][R] = Σ_{i<R} values[n][i]`, so `prefix[n][0] = 0`.
    prefix: Vec<Vec<f64>>,
    budget: u64,
}

/// On-disk JSON form: `{"dims": [...], "budget": c, "values": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub dims: Vec<usize>,
    pub budget: u64,
    pub values: Vec<Vec<f64>>,
}

impl PackingInstance {
    /// Validates and builds an instance. Values must be nonnegative and
    /// non-increasing up to a `1e-12` relative slack; violations within the
    /// slack are repaired by clamping and a running minimum.
    pub fn new(dims: Vec<usize>, values: Vec<Vec<f64>>, budget: u64) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidInstance("instance needs at least one mode".into()));
        }
        if values.len() != dims.len() {
            return Err(Error::InvalidInstance(format!(
                "{} value lists for {} modes",
                values.len(),
                dims.len()
            )));
        }
        for (n, (vals, &d)) in values.iter().zip(&dims).enumerate() {
            if d == 0 {
                return Err(Error::InvalidInstance(format!("mode {n} has size 0")));
            }
            if vals.is_empty() || vals.len() > d {
                return Err(Error::InvalidInstance(format!(
                    "mode {n}: {} values for dimension {d}",
                    vals.len()
                )));
            }
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInstance(format!("mode {n}: non-finite value")));
            }
            let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let tol = LOAD_SLACK * scale;
            if let Some(i) = vals.iter().position(|&v| v < -tol) {
                return Err(Error::InvalidInstance(format!(
                    "mode {n}: value {} at position {i} is negative",
                    vals[i]
                )));
            }
            if let Some(i) = (1..vals.len()).find(|&i| vals[i] > vals[i - 1] + tol) {
                return Err(Error::InvalidInstance(format!(
                    "mode {n}: values increase at position {i}"
                )));
            }
        }
        Self::build(dims, values, budget)
    }

    /// Instance over the squared mode singular values of a tensor.
    pub fn from_spectra(spectra: &ModeSpectra, budget: u64) -> Result<Self> {
        Self::build(spectra.dims(), spectra.sq_singular_values.clone(), budget)
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        Self::new(file.dims, file.values, file.budget)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            dims: self.dims.clone(),
            budget: self.budget,
            values: self.values.clone(),
        }
    }

    fn build(dims: Vec<usize>, mut values: Vec<Vec<f64>>, budget: u64) -> Result<Self> {
        let minimum = 1 + dims.iter().map(|&d| d as u64).sum::<u64>();
        if budget < minimum {
            return Err(Error::BudgetTooSmall { budget, minimum });
        }
        for vals in &mut values {
            let mut running = f64::INFINITY;
            for v in vals.iter_mut() {
                running = running.min(v.max(0.0));
                *v = running;
            }
        }
        let prefix = values
            .iter()
            .map(|vals| {
                let mut p = Vec::with_capacity(vals.len() + 1);
                p.push(0.0);
                let mut acc = 0.0;
                for &v in vals {
                    acc += v;
                    p.push(acc);
                }
                p
            })
            .collect();
        Ok(Self {
            dims,
            values,
            prefix,
            budget,
        })
    }

    /// Restricts each mode to ranks `≤ caps[n]` without changing the cost model.
    pub fn with_rank_caps(&self, caps: &[usize]) -> Result<Self> {
        if caps.len() != self.order() {
            return Err(Error::InvalidInstance(format!(
                "{} rank caps for {} modes",
                caps.len(),
                self.order()
            )));
        }
        if caps.contains(&0) {
            return Err(Error::InvalidInstance("rank caps must be ≥ 1".into()));
        }
        let values = self
            .values
            .iter()
            .zip(caps)
            .map(|(v, &c)| v[..c.min(v.len())].to_vec())
            .collect();
        Self::build(self.dims.clone(), values, self.budget)
    }

    pub fn with_budget(&self, budget: u64) -> Result<Self> {
        Self::build(self.dims.clone(), self.values.clone(), budget)
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn prefix(&self) -> &[Vec<f64>] {
        &self.prefix
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Largest admissible rank on mode `n`.
    pub fn max_rank(&self, n: usize) -> usize {
        self.values[n].len()
    }

    pub fn max_ranks(&self) -> Vec<usize> {
        self.values.iter().map(Vec::len).collect()
    }

    pub fn min_cost(&self) -> u64 {
        1 + self.dims.iter().map(|&d| d as u64).sum::<u64>()
    }

    fn check_ranks(&self, r: &[usize]) -> Result<()> {
        if r.len() != self.order() {
            return Err(Error::InvalidRank(format!(
                "shape of order {} for an order-{} instance",
                r.len(),
                self.order()
            )));
        }
        for (n, &rank) in r.iter().enumerate() {
            if rank == 0 || rank > self.max_rank(n) {
                return Err(Error::InvalidRank(format!(
                    "rank {rank} on mode {n} is outside [1, {}]",
                    self.max_rank(n)
                )));
            }
        }
        Ok(())
    }

    /// `f(r) = Σ_n prefix[n][R_n]`, summed in mode order.
    pub fn objective(&self, r: &[usize]) -> Result<f64> {
        self.check_ranks(r)?;
        Ok(self.objective_unchecked(r))
    }

    pub(crate) fn objective_unchecked(&self, r: &[usize]) -> f64 {
        r.iter()
            .zip(&self.prefix)
            .fold(0.0, |acc, (&rank, p)| acc + p[rank])
    }

    /// `∏R_n + Σ I_n R_n` in saturating integer arithmetic.
    pub fn cost(&self, r: &[usize]) -> u128 {
        tucker_cost(&self.dims, r)
    }

    pub fn core_cost(&self, r: &[usize]) -> u128 {
        r.iter().fold(1u128, |acc, &x| acc.saturating_mul(x as u128))
    }

    pub fn feasible(&self, r: &[usize]) -> Result<bool> {
        self.check_ranks(r)?;
        Ok(self.cost(r) <= self.budget as u128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_arithmetic() {
        let inst = PackingInstance::new(vec![4, 4, 4], vec![vec![1.0; 4]; 3], 32).unwrap();
        assert_eq!(inst.cost(&[2, 2, 2]), 32);
        assert!(inst.feasible(&[2, 2, 2]).unwrap());
        assert!(!inst.with_budget(31).unwrap().feasible(&[2, 2, 2]).unwrap());
        assert_eq!(inst.cost(&[1, 1, 1]), 13);
    }

    #[test]
    fn objective_hand_value() {
        let inst = PackingInstance::new(vec![2, 2], vec![vec![3.0, 1.0], vec![2.0, 2.0]], 100).unwrap();
        assert_eq!(inst.objective(&[1, 2]).unwrap(), 7.0);
        assert!(inst.objective(&[0, 1]).is_err());
        assert!(inst.objective(&[3, 1]).is_err());
        assert!(inst.objective(&[1]).is_err());
    }

    #[test]
    fn budget_must_admit_all_ones() {
        let err = PackingInstance::new(vec![2, 3], vec![vec![1.0; 2], vec![1.0; 3]], 5);
        assert!(matches!(err, Err(Error::BudgetTooSmall { budget: 5, minimum: 6 })));
        assert!(PackingInstance::new(vec![2, 3], vec![vec![1.0; 2], vec![1.0; 3]], 6).is_ok());
    }

    #[test]
    fn loader_slack_and_repair() {
        let ok = PackingInstance::new(vec![3], vec![vec![1.0, 1.0 + 1e-13, -1e-13]], 10).unwrap();
        assert_eq!(ok.values()[0], vec![1.0, 1.0, 0.0]);
        assert!(PackingInstance::new(vec![2], vec![vec![1.0, 1.1]], 10).is_err());
        assert!(PackingInstance::new(vec![2], vec![vec![1.0, -0.1]], 10).is_err());
        assert!(PackingInstance::new(vec![2], vec![vec![1.0, 0.5, 0.1]], 10).is_err());
        assert!(PackingInstance::new(vec![2], vec![vec![f64::NAN]], 10).is_err());
    }

    #[test]
    fn prefix_layout() {
        let inst = PackingInstance::new(vec![3], vec![vec![3.0, 2.0, 1.0]], 10).unwrap();
        assert_eq!(inst.prefix()[0], vec![0.0, 3.0, 5.0, 6.0]);
    }

    #[test]
    fn rank_caps_keep_factor_cost() {
        let inst = PackingInstance::new(vec![5, 5], vec![vec![1.0; 5]; 2], 100).unwrap();
        let capped = inst.with_rank_caps(&[2, 3]).unwrap();
        assert_eq!(capped.max_ranks(), vec![2, 3]);
        assert_eq!(capped.cost(&[2, 3]), inst.cost(&[2, 3]));
    }

    #[test]
    fn file_round_trip() {
        let inst = PackingInstance::new(vec![2, 2], vec![vec![2.0, 1.0], vec![4.0, 0.0]], 9).unwrap();
        let json = serde_json::to_string(&inst.to_file()).unwrap();
        let back = PackingInstance::from_file(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, inst);
    }
}
