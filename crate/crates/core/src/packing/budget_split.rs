//! Budget-splitting solver.
//!
//! The total budget is split between the core (`∏ R_n ≤ c_core`) and the
//! factor matrices (`Σ I_n R_n ≤ c_factor`). Two families of splits are tried:
//!
//! * small shapes, all `R_n ≤ ⌈1/ε⌉`: every `c_factor ∈ [1, ⌈1/ε⌉ ΣI_n]` with
//!   `c_core = c − c_factor`;
//! * large shapes: `c_core = ⌊(1+ε)^k⌋` for `k = 0..⌊log_{1+ε} c⌋` with
//!   `c_factor = c − c_core`.
//!
//! Each split is a two-constraint knapsack with one pick per mode, solved
//! exactly by [`solve_2dk_matroid`]. The best candidate over all splits is
//! within `1 − 3ε` of the optimum for `0 < ε < 1/3`.

use std::time::Instant;

use rayon::prelude::*;

use super::{check_epsilon, PackingInstance, Solution, SolverId};
use crate::decomp::CoreShape;
use crate::error::Result;

pub fn solve_budget_split(inst: &PackingInstance, eps: f64) -> Result<Solution> {
    check_epsilon(
        eps,
        1.0 / 3.0,
        false,
        "the budget-splitting guarantee requires 0 < ε < 1/3",
    )?;
    let start = Instant::now();
    let c = inst.budget();
    let small_cap = (1.0 / eps).ceil() as u64;
    let dim_sum: u64 = inst.dims().iter().map(|&d| d as u64).sum();

    // (c_core, c_factor, caps) in split order
    let mut splits: Vec<(u64, u64, Vec<usize>)> = Vec::new();
    let small_caps: Vec<usize> = inst
        .max_ranks()
        .iter()
        .map(|&m| m.min(usize::try_from(small_cap).unwrap_or(usize::MAX)))
        .collect();
    for c_factor in 1..=small_cap.saturating_mul(dim_sum) {
        if c_factor >= c {
            break;
        }
        splits.push((c - c_factor, c_factor, small_caps.clone()));
    }

    let full_caps = inst.max_ranks();
    let base = 1.0 + eps;
    let mut last_core = 0u64;
    let mut k: i32 = 0;
    loop {
        let pow = base.powi(k);
        if pow.is_nan() || pow > c as f64 {
            break;
        }
        let c_core = (pow.floor() as u64).max(1);
        if c_core != last_core && c_core < c {
            splits.push((c_core, c - c_core, full_caps.clone()));
        }
        last_core = c_core;
        k += 1;
    }

    let candidates: Vec<Option<Vec<usize>>> = splits
        .par_iter()
        .map(|(core, factor, caps)| solve_2dk_matroid(inst, *core, *factor, caps).map(|s| s.0))
        .collect();

    let mut best: Option<(Vec<usize>, f64)> = None;
    for r in candidates.into_iter().flatten() {
        let v = inst.objective_unchecked(&r);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((r, v));
        }
    }
    // The all-ones shape fits the split c_factor = ΣI_n, which the small phase
    // always covers since ⌈1/ε⌉ ≥ 1 and c > ΣI_n.
    let (r, _) = best.expect("all-ones shape is always a candidate");
    Ok(Solution::new(
        inst,
        CoreShape(r),
        SolverId::BudgetSplit,
        start.elapsed(),
    ))
}

/// Exact maximizer of `f(r)` subject to `∏R_n ≤ c_core`, `Σ I_n R_n ≤ c_factor`
/// and `1 ≤ R_n ≤ caps[n]`. `None` when even `(1, …, 1)` violates a constraint.
///
/// Depth-first branch and bound over modes in index order with ranks in
/// ascending order, so complete shapes are visited lexicographically and the
/// first maximizer found is the lexicographically smallest. A subtree is cut
/// when its bound (current value plus, for each open mode, the prefix at the
/// largest rank that mode could afford on its own) cannot beat the incumbent.
/// The last mode is resolved in closed form.
pub fn solve_2dk_matroid(
    inst: &PackingInstance,
    c_core: u64,
    c_factor: u64,
    caps: &[usize],
) -> Option<CoreShape> {
    let n = inst.order();
    assert_eq!(caps.len(), n, "one cap per mode");
    let caps: Vec<usize> = caps
        .iter()
        .enumerate()
        .map(|(m, &cap)| cap.clamp(1, inst.max_rank(m)))
        .collect();
    let mut reserve = vec![0u128; n + 1];
    for m in (0..n).rev() {
        reserve[m] = reserve[m + 1] + inst.dims()[m] as u128;
    }
    if c_core < 1 || reserve[0] > c_factor as u128 {
        return None;
    }

    // first_equal[m][R]: smallest R' with prefix[m][R'] == prefix[m][R]
    let first_equal: Vec<Vec<usize>> = (0..n)
        .map(|m| {
            let p = &inst.prefix()[m];
            let mut fe = vec![0usize; caps[m] + 1];
            for r in 1..=caps[m] {
                fe[r] = if r > 1 && p[r] == p[r - 1] { fe[r - 1] } else { r };
            }
            fe
        })
        .collect();

    let mut bb = BranchAndBound {
        inst,
        caps,
        first_equal,
        reserve,
        c_core: c_core as u128,
        c_factor: c_factor as u128,
        current: vec![1; n],
        best: None,
    };
    bb.descend(0, 1, 0, 0.0);
    bb.best.map(|(r, _)| CoreShape(r))
}

struct BranchAndBound<'a> {
    inst: &'a PackingInstance,
    caps: Vec<usize>,
    first_equal: Vec<Vec<usize>>,
    reserve: Vec<u128>,
    c_core: u128,
    c_factor: u128,
    current: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl BranchAndBound<'_> {
    /// Largest rank mode `m` can take alone, given the core product and factor
    /// sum of the modes before it, with every other open mode at rank one.
    fn affordable(&self, m: usize, core: u128, factor_left: u128) -> usize {
        let by_core = self.c_core / core;
        let dim = self.inst.dims()[m] as u128;
        let by_factor = factor_left / dim;
        let cap = self.caps[m] as u128;
        cap.min(by_core).min(by_factor) as usize
    }

    fn descend(&mut self, mode: usize, core: u128, factor: u128, value: f64) {
        let last = self.inst.order() - 1;
        let prefix = self.inst.prefix();
        if mode == last {
            // factor budget left for this mode after the ones already placed
            let left = self.c_factor - factor;
            let rmax = self.affordable(mode, core, left);
            if rmax == 0 {
                return;
            }
            let rank = self.first_equal[mode][rmax];
            let v = value + prefix[mode][rank];
            if self.best.as_ref().is_none_or(|(_, b)| v > *b) {
                self.current[mode] = rank;
                self.best = Some((self.current.clone(), v));
                self.current[mode] = 1;
            }
            return;
        }

        let dim = self.inst.dims()[mode] as u128;
        for rank in 1..=self.caps[mode] {
            let core_next = core * rank as u128;
            if core_next > self.c_core {
                break;
            }
            let factor_next = factor + dim * rank as u128;
            if factor_next + self.reserve[mode + 1] > self.c_factor {
                break;
            }
            let v = value + prefix[mode][rank];
            if let Some((_, best)) = &self.best {
                // bound summed in mode order so it dominates every completion in floating point
                let mut bound = v;
                for m in mode + 1..=last {
                    let others = self.reserve[mode + 1] - self.inst.dims()[m] as u128;
                    let left = self.c_factor - factor_next - others;
                    bound += prefix[m][self.affordable(m, core_next, left)];
                }
                if bound <= *best {
                    continue;
                }
            }
            self.current[mode] = rank;
            self.descend(mode + 1, core_next, factor_next, v);
        }
        self.current[mode] = 1;
    }
}
