use std::time::Instant;

use super::grid::best_on_grids;
use super::{PackingInstance, Solution, SolverId};
use crate::decomp::CoreShape;
use crate::error::{Error, Result};

/// Largest number of candidate shapes the exhaustive solver will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 100_000_000;

/// Exact optimum by enumerating every shape in lexicographic order.
///
/// Since the cost is increasing in every coordinate, a rank loop stops at the
/// first infeasible value; the objective is never used for pruning.
pub fn solve_brute_force(inst: &PackingInstance) -> Result<Solution> {
    let start = Instant::now();
    let space = inst
        .max_ranks()
        .iter()
        .fold(1u128, |acc, &r| acc.saturating_mul(r as u128));
    if space > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!(
            "{space} candidate shapes exceed the brute-force limit of {BRUTE_FORCE_LIMIT}"
        )));
    }

    let grids: Vec<Vec<usize>> = inst.max_ranks().into_iter().map(|r| (1..=r).collect()).collect();
    let best = best_on_grids(inst, &grids);
    Ok(Solution::new(
        inst,
        CoreShape(best),
        SolverId::BruteForce,
        start.elapsed(),
    ))
}
