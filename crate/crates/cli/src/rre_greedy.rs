//! Baseline that grows the core shape one mode at a time, picking the
//! neighbor with the lowest HOOI reconstruction error.

use coreshape::decomp::{hooi, rre, tucker_cost, CoreShape};
use coreshape::tensor::DenseTensor;
use coreshape::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub shape: Vec<usize>,
    pub rre: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RreGreedy {
    pub shape: CoreShape,
    pub rre: f64,
    /// Shapes visited from `(1, …, 1)` onward, each with its HOOI RRE.
    pub trajectory: Vec<Step>,
}

/// Starts at `(1, …, 1)` and repeatedly moves to the feasible neighbor
/// `r + e_n` (with `R_n ≤ caps[n]`) of smallest HOOI loss, lowest mode on
/// ties, until no neighbor fits the budget.
pub fn rre_greedy(x: &DenseTensor, budget: u64, hooi_iters: usize, caps: &[usize]) -> Result<RreGreedy> {
    let dims = x.shape();
    if caps.len() != dims.len() {
        return Err(Error::InvalidRank(format!(
            "{} rank caps for a tensor of order {}",
            caps.len(),
            dims.len()
        )));
    }
    let minimum = tucker_cost(dims, &vec![1; dims.len()]);
    if (budget as u128) < minimum {
        return Err(Error::BudgetTooSmall {
            budget,
            minimum: minimum as u64,
        });
    }
    let eval = |r: &[usize]| -> Result<f64> {
        let d = hooi(x, &CoreShape(r.to_vec()), hooi_iters, None)?;
        rre(x, &d)
    };

    let mut r = vec![1; dims.len()];
    let mut current = eval(&r)?;
    let mut trajectory = vec![Step {
        shape: r.clone(),
        rre: current,
    }];
    loop {
        let candidates: Vec<usize> = (0..dims.len())
            .filter(|&n| r[n] < caps[n].min(dims[n]))
            .filter(|&n| {
                let mut next = r.clone();
                next[n] += 1;
                tucker_cost(dims, &next) <= budget as u128
            })
            .collect();
        if candidates.is_empty() {
            break;
        }
        let scores: Vec<f64> = candidates
            .par_iter()
            .map(|&n| {
                let mut next = r.clone();
                next[n] += 1;
                eval(&next)
            })
            .collect::<Result<_>>()?;
        let mut pick = 0;
        for k in 1..scores.len() {
            if scores[k] < scores[pick] {
                pick = k;
            }
        }
        r[candidates[pick]] += 1;
        current = scores[pick];
        trajectory.push(Step {
            shape: r.clone(),
            rre: current,
        });
    }
    Ok(RreGreedy {
        shape: CoreShape(r),
        rre: current,
        trajectory,
    })
}
