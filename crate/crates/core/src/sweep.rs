//! Randomized sweeps over generated Mealy targets. The case loop runs on
//! rayon when the `parallel` feature is on and sequentially otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equivalence::{DistOracle, PerfectOracle};
use crate::error::Result;
use crate::learner::{lstar, query_budget, LStarConfig};
use crate::minimize::{distinguisher_bound, minimize};
use crate::oracle::{MealyOracle, MembershipOracle};
use crate::random::random_minimal_mealy;
use crate::sul::QueryCache;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SweepCase {
    pub seed: u64,
    pub states: usize,
    pub inputs: usize,
    pub outputs: usize,
}

/// `count` cases with 2–8 states, 2–5 inputs and 2–4 outputs.
pub fn sweep_cases(count: usize, seed: u64) -> Vec<SweepCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| SweepCase {
            seed: rng.gen(),
            states: rng.gen_range(2..=8),
            inputs: rng.gen_range(2..=5),
            outputs: rng.gen_range(2..=4),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SweepOracle {
    Perfect,
    /// Distinguisher oracle with the target's own bound.
    DistExact,
    Dist(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub case: SweepCase,
    pub target_states: usize,
    pub learned_states: usize,
    pub correct: bool,
    pub b_needed: usize,
    pub b_used: Option<usize>,
    pub eq: usize,
    pub learner_queries: u64,
    pub mq_asked: u64,
    pub mq_executed: u64,
    pub max_cex_len: usize,
    /// Learner-side query bound for this target.
    pub learner_budget: u128,
    /// Largest number of queries one distinguisher call executed.
    pub max_eq_executed: u64,
    /// Whether every distinguisher call stayed within `|Q|·|Σ|^(B+1)`.
    pub eq_within_budget: bool,
}

pub fn run_case(case: SweepCase, oracle: SweepOracle) -> Result<SweepResult> {
    let target = random_minimal_mealy(case.states, case.inputs, case.outputs, case.seed)?;
    let b_needed = distinguisher_bound(&target)?;
    let mut mq = QueryCache::new(MealyOracle::new(target.clone()));
    let config = LStarConfig::default();
    let (result, b_used, calls) = match oracle {
        SweepOracle::Perfect => {
            let mut eq = PerfectOracle::new(&target);
            (lstar(&mut mq, &mut eq, &config)?, None, Vec::new())
        }
        SweepOracle::DistExact | SweepOracle::Dist(_) => {
            let b = match oracle {
                SweepOracle::Dist(b) => b,
                _ => b_needed,
            };
            let mut eq = DistOracle::new(b);
            let r = lstar(&mut mq, &mut eq, &config)?;
            (r, Some(b), eq.calls)
        }
    };
    let learned = minimize(&result.machine);
    let counters = mq.counters();
    Ok(SweepResult {
        case,
        target_states: target.state_count(),
        learned_states: learned.state_count(),
        correct: learned.traces_equal(&target)?.is_correct(),
        b_needed,
        b_used,
        eq: result.stats.eq_count(),
        learner_queries: result.stats.learner_queries,
        mq_asked: counters.asked,
        mq_executed: counters.executed,
        max_cex_len: result.stats.max_cex_len,
        learner_budget: query_budget(case.inputs, target.state_count(), result.stats.max_cex_len),
        max_eq_executed: calls.iter().map(|c| c.executed).max().unwrap_or(0),
        eq_within_budget: calls.iter().all(|c| c.executed as u128 <= c.budget),
    })
}

/// Runs every case, in parallel when the `parallel` feature is enabled.
/// Results keep the order of `cases`.
pub fn run_sweep(cases: &[SweepCase], oracle: SweepOracle) -> Vec<Result<SweepResult>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cases.par_iter().map(|c| run_case(*c, oracle)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sweep_sequential(cases, oracle)
    }
}

pub fn run_sweep_sequential(cases: &[SweepCase], oracle: SweepOracle) -> Vec<Result<SweepResult>> {
    cases.iter().map(|c| run_case(*c, oracle)).collect()
}
