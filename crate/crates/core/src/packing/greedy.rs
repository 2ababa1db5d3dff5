use std::time::Instant;

use super::{PackingInstance, Solution, SolverId};
use crate::decomp::CoreShape;

/// Coordinate ascent from `(1, …, 1)`: each step increments the mode with the
/// largest objective gain among feasible neighbors.
pub fn solve_greedy(inst: &PackingInstance) -> Solution {
    ascend(inst, SolverId::Greedy, |gain, _| gain)
}

/// Like [`solve_greedy`] but ranks neighbors by objective gain per unit of
/// added cost.
pub fn solve_bang_for_buck(inst: &PackingInstance) -> Solution {
    ascend(inst, SolverId::BangForBuck, |gain, extra| gain / extra as f64)
}

/// Shared ascent loop. Stops when no neighbor is feasible or when the best
/// neighbor adds nothing to the objective: values are non-increasing, so a
/// zero gain on every mode means no later step can gain either.
fn ascend(inst: &PackingInstance, id: SolverId, score: impl Fn(f64, u128) -> f64) -> Solution {
    let start = Instant::now();
    let budget = inst.budget() as u128;
    let mut r = vec![1usize; inst.order()];
    let mut value = inst.objective_unchecked(&r);
    let mut cost = inst.cost(&r);
    loop {
        let mut best: Option<(usize, f64, f64, u128)> = None;
        for n in 0..inst.order() {
            if r[n] == inst.max_rank(n) {
                continue;
            }
            r[n] += 1;
            let c = inst.cost(&r);
            let v = inst.objective_unchecked(&r);
            r[n] -= 1;
            if c > budget {
                continue;
            }
            let s = score(v - value, c - cost);
            if best.is_none_or(|(_, bs, _, _)| s > bs) {
                best = Some((n, s, v, c));
            }
        }
        match best {
            Some((n, s, v, c)) if s > 0.0 => {
                r[n] += 1;
                value = v;
                cost = c;
            }
            _ => break,
        }
    }
    Solution::new(inst, CoreShape(r), id, start.elapsed())
}
