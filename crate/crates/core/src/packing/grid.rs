use std::time::Instant;

use super::{check_epsilon, PackingInstance, Solution, SolverId};
use crate::decomp::CoreShape;
use crate::error::Result;

/// `{⌈(1+ε)^k⌉ : k ≥ 0} ∩ [1, cap]`, ascending and deduplicated.
pub fn grid_values(eps: f64, cap: usize) -> Vec<usize> {
    let mut out = vec![1usize];
    let base = 1.0 + eps;
    let mut k: i32 = 1;
    loop {
        let v = base.powi(k).ceil();
        if !v.is_finite() || v > cap as f64 {
            break;
        }
        let v = v as usize;
        if v != *out.last().unwrap() {
            out.push(v);
        }
        k += 1;
    }
    out
}

/// Exhaustive search restricted to geometric rank grids. For any downwards
/// closed feasible set the result is within a factor `1+ε` of the optimum.
pub fn solve_grid_search(inst: &PackingInstance, eps: f64) -> Result<Solution> {
    check_epsilon(eps, 1.0, true, "grid search needs 0 < ε ≤ 1")?;
    let start = Instant::now();
    let grids: Vec<Vec<usize>> = (0..inst.order())
        .map(|n| grid_values(eps, inst.max_rank(n)))
        .collect();
    let best = best_on_grids(inst, &grids);
    Ok(Solution::new(inst, CoreShape(best), SolverId::Grid, start.elapsed()))
}

/// Lexicographic enumeration of `grids[0] × ⋯ × grids[N-1]`, keeping the first
/// strictly better feasible tuple.
pub(crate) fn best_on_grids(inst: &PackingInstance, grids: &[Vec<usize>]) -> Vec<usize> {
    let n = inst.order();
    let mut reserve = vec![0u128; n + 1];
    for m in (0..n).rev() {
        reserve[m] = reserve[m + 1] + inst.dims()[m] as u128;
    }
    let mut walk = GridWalk {
        inst,
        grids,
        reserve,
        budget: inst.budget() as u128,
        current: vec![1; n],
        best: None,
    };
    walk.descend(0, 1, 0, 0.0);
    walk.best.expect("all-ones shape is always feasible").0
}

struct GridWalk<'a> {
    inst: &'a PackingInstance,
    grids: &'a [Vec<usize>],
    reserve: Vec<u128>,
    budget: u128,
    current: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl GridWalk<'_> {
    fn descend(&mut self, mode: usize, core: u128, factor: u128, value: f64) {
        if mode == self.inst.order() {
            if self.best.as_ref().is_none_or(|(_, b)| value > *b) {
                self.best = Some((self.current.clone(), value));
            }
            return;
        }
        let dim = self.inst.dims()[mode] as u128;
        for &rank in &self.grids[mode] {
            let core = core.saturating_mul(rank as u128);
            let factor = factor + dim * rank as u128;
            if core.saturating_add(factor + self.reserve[mode + 1]) > self.budget {
                break;
            }
            self.current[mode] = rank;
            let v = value + self.inst.prefix()[mode][rank];
            self.descend(mode + 1, core, factor, v);
        }
        self.current[mode] = 1;
    }
}
