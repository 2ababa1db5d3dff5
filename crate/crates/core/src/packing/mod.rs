//! The Tucker packing problem: choose a core shape `r` maximizing
//! `f(r) = Σ_n Σ_{i ≤ R_n} a_i^{(n)}` subject to `∏R_n + Σ I_n R_n ≤ c`.
//!
//! With `a^{(n)}` the squared singular values of the mode-`n` unfolding,
//! `f(r) = N‖X‖_F² − L̃(X, r)`, so maximizing `f` minimizes the surrogate loss.
//!
//! Every solver breaks ties toward the lexicographically smallest shape.

mod brute;
mod budget_split;
mod greedy;
mod grid;
mod instance;
mod mck;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use brute::{solve_brute_force, BRUTE_FORCE_LIMIT};
pub use budget_split::{solve_2dk_matroid, solve_budget_split};
pub use greedy::{solve_bang_for_buck, solve_greedy};
pub use grid::{grid_values, solve_grid_search};
pub use instance::{InstanceFile, PackingInstance};
pub use mck::solve_mck_core_only;

use crate::decomp::CoreShape;
use crate::error::{Error, Result};

/// Default accuracy parameter of the budget-splitting solver.
pub const DEFAULT_EPSILON: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SolverId {
    #[serde(rename = "ip")]
    BudgetSplit,
    #[serde(rename = "greedy")]
    Greedy,
    #[serde(rename = "bang")]
    BangForBuck,
    #[serde(rename = "brute")]
    BruteForce,
    #[serde(rename = "grid")]
    Grid,
    #[serde(rename = "mck")]
    Mck,
    #[serde(rename = "rre-greedy")]
    RreGreedy,
}

impl SolverId {
    pub const ALL: [SolverId; 7] = [
        SolverId::BudgetSplit,
        SolverId::Greedy,
        SolverId::BangForBuck,
        SolverId::BruteForce,
        SolverId::Grid,
        SolverId::Mck,
        SolverId::RreGreedy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::BudgetSplit => "ip",
            SolverId::Greedy => "greedy",
            SolverId::BangForBuck => "bang",
            SolverId::BruteForce => "brute",
            SolverId::Grid => "grid",
            SolverId::Mck => "mck",
            SolverId::RreGreedy => "rre-greedy",
        }
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidInstance(format!("unknown solver {s:?}")))
    }
}

/// A core shape returned by one of the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub shape: CoreShape,
    pub objective: f64,
    /// Cost under the constraint the solver optimized: the full Tucker size for
    /// every solver except [`SolverId::Mck`], which only counts the core.
    pub cost: u128,
    pub solver: SolverId,
    pub elapsed: Duration,
}

impl Solution {
    pub(crate) fn new(
        inst: &PackingInstance,
        shape: CoreShape,
        solver: SolverId,
        elapsed: Duration,
    ) -> Self {
        let objective = inst.objective_unchecked(shape.ranks());
        let cost = match solver {
            SolverId::Mck => inst.core_cost(shape.ranks()),
            _ => inst.cost(shape.ranks()),
        };
        Solution {
            shape,
            objective,
            cost,
            solver,
            elapsed,
        }
    }

    pub fn to_json(&self) -> SolutionJson {
        SolutionJson {
            shape: self.shape.0.clone(),
            objective: self.objective,
            cost: u64::try_from(self.cost).unwrap_or(u64::MAX),
            solver: self.solver,
            elapsed_ms: self.elapsed.as_secs_f64() * 1e3,
        }
    }
}

/// Wire form of a [`Solution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub shape: Vec<usize>,
    pub objective: f64,
    pub cost: u64,
    pub solver: SolverId,
    pub elapsed_ms: f64,
}

pub(crate) fn check_epsilon(eps: f64, upper: f64, inclusive: bool, why: &'static str) -> Result<()> {
    let ok = eps > 0.0 && if inclusive { eps <= upper } else { eps < upper };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon { eps, reason: why })
    }
}

/// Dispatches to the solver named by `id`. `eps` is ignored by solvers without
/// an accuracy parameter.
pub fn solve(inst: &PackingInstance, id: SolverId, eps: f64) -> Result<Solution> {
    match id {
        SolverId::BudgetSplit => solve_budget_split(inst, eps),
        SolverId::Greedy => Ok(solve_greedy(inst)),
        SolverId::BangForBuck => Ok(solve_bang_for_buck(inst)),
        SolverId::BruteForce => solve_brute_force(inst),
        SolverId::Grid => solve_grid_search(inst, eps),
        SolverId::Mck => solve_mck_core_only(inst, eps),
        SolverId::RreGreedy => Err(Error::InvalidInstance(
            "rre-greedy needs the tensor, not just its spectra".into(),
        )),
    }
}
