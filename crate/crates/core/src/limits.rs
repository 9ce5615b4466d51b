use serde::{Deserialize, Serialize};

/// Degree ceilings and enumeration budgets. The defaults keep every
/// exhaustive routine at seconds-to-minutes scale on one core.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Largest degree for exhaustive subset enumeration in expander checks.
    pub exact_expander: usize,
    /// Single loop over `P_n`.
    pub single_loop: usize,
    /// Double loop over `P_n × P_n` (commutant sets).
    pub double_loop: usize,
    /// Conjugacy-distance balls, which cost `(n!)²`.
    pub s_ball: usize,
    /// Exact conjugacy distance by minimizing over all of `P_n`.
    pub s_distance_exact: usize,
    /// Words visited when enumerating a ball of the free group.
    pub word_budget: u128,
    /// Trials of the sampled refuter when a degree is over `exact_expander`.
    pub sampled_trials: usize,
    /// Iterations of conjugacy annealing.
    pub anneal_steps: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            exact_expander: 20,
            single_loop: 9,
            double_loop: 7,
            s_ball: 5,
            s_distance_exact: 8,
            word_budget: crate::perm::DEFAULT_WORD_BUDGET,
            sampled_trials: 64,
            anneal_steps: 200_000,
        }
    }
}
