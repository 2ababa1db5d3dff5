//! Core-size-only relaxation, `max f(r)` s.t. `∏ R_n ≤ c`, as a multiple-choice
//! knapsack: one item (a rank) per mode with profit `prefix[n][R]` and weight
//! `log R`. Profits are scaled by `K = ε·P_max/N` and rounded down, then a DP
//! over (mode, scaled profit) keeps the lightest way to reach each profit.
//!
//! Weights are carried as exact integer products rather than sums of
//! logarithms; minimizing one minimizes the other, and feasibility is then
//! decided without rounding.

use std::time::Instant;

use super::{check_epsilon, PackingInstance, Solution, SolverId};
use crate::decomp::CoreShape;
use crate::error::Result;

#[allow(clippy::needless_range_loop)]
pub fn solve_mck_core_only(inst: &PackingInstance, eps: f64) -> Result<Solution> {
    check_epsilon(eps, 1.0, false, "the knapsack FPTAS needs 0 < ε < 1")?;
    let start = Instant::now();
    let n_modes = inst.order();
    let budget = inst.budget();
    let done = |r: Vec<usize>| Solution::new(inst, CoreShape(r), SolverId::Mck, start.elapsed());

    // A rank above c can never fit, even with every other mode at one.
    let caps: Vec<usize> = (0..n_modes)
        .map(|n| inst.max_rank(n).min(usize::try_from(budget).unwrap_or(usize::MAX)))
        .collect();
    let p_max = (0..n_modes)
        .map(|n| inst.prefix()[n][caps[n]])
        .fold(0.0, f64::max);
    if p_max <= 0.0 {
        return Ok(done(vec![1; n_modes]));
    }
    let k = eps * p_max / n_modes as f64;

    let scaled: Vec<Vec<usize>> = (0..n_modes)
        .map(|n| {
            (0..=caps[n])
                .map(|r| (inst.prefix()[n][r] / k).floor() as usize)
                .collect()
        })
        .collect();
    let top: usize = scaled.iter().zip(&caps).map(|(s, &c)| s[c]).sum();

    // weight[p] = smallest core size reaching scaled profit p; budget+1 marks "unreachable".
    let over = budget as u128 + 1;
    let mut weight = vec![over; top + 1];
    weight[0] = 1;
    let mut choice: Vec<Vec<usize>> = Vec::with_capacity(n_modes);
    let mut reach = 0usize;
    for n in 0..n_modes {
        let mut next = vec![over; top + 1];
        let mut pick = vec![0usize; top + 1];
        for p in 0..=reach {
            if weight[p] >= over {
                continue;
            }
            for rank in 1..=caps[n] {
                let w = weight[p].saturating_mul(rank as u128);
                if w >= over {
                    break;
                }
                let q = p + scaled[n][rank];
                if w < next[q] {
                    next[q] = w;
                    pick[q] = rank;
                }
            }
        }
        reach += scaled[n][caps[n]];
        weight = next;
        choice.push(pick);
    }

    let mut p = (0..=top)
        .rev()
        .find(|&p| weight[p] <= budget as u128)
        .expect("all-ones shape has weight 1");
    let mut r = vec![0usize; n_modes];
    for n in (0..n_modes).rev() {
        let rank = choice[n][p];
        r[n] = rank;
        p -= scaled[n][rank];
    }
    Ok(done(r))
}
