use super::{EqOutcome, EquivalenceOracle};
use crate::alphabet::words_of_length;
use crate::error::{Error, Result};
use crate::mealy::MealyMachine;
use crate::oracle::MembershipOracle;

/// Number of maximal words checked for a `k`-state hypothesis under state
/// bound `b`: `|Σ|^(k+b-1)`, saturating at `u128::MAX`.
pub fn theoretical_words(inputs: usize, k: usize, b_state: usize) -> u128 {
    let len = (k + b_state).saturating_sub(1);
    let mut acc: u128 = 1;
    for _ in 0..len {
        acc = match acc.checked_mul(inputs as u128) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}

/// Exhaustive comparison on every word of length `k + b_state - 1` (shorter
/// words are prefixes of these). Refuses to start if the word count exceeds
/// `budget`.
pub fn state_bound_equivalence(
    h: &MealyMachine,
    b_state: usize,
    mq: &mut dyn MembershipOracle,
    budget: u128,
) -> Result<EqOutcome> {
    let n = h.alphabet().input_count();
    let words = theoretical_words(n, h.state_count(), b_state);
    if words > budget {
        return Err(Error::QueryBudget { words, budget });
    }
    let len = (h.state_count() + b_state).saturating_sub(1);
    for w in words_of_length(n, len) {
        let got = mq.query(&w)?;
        let expected = h.mealy_output(&w)?;
        if let Some(k) = got.iter().zip(&expected).position(|(a, b)| a != b) {
            return Ok(EqOutcome::cex(w[..=k].to_vec()));
        }
    }
    Ok(EqOutcome::Correct)
}

#[derive(Clone, Debug)]
pub struct StateBoundOracle {
    pub b_state: usize,
    pub budget: u128,
}

impl StateBoundOracle {
    pub fn new(b_state: usize, budget: u128) -> Self {
        StateBoundOracle { b_state, budget }
    }
}

impl EquivalenceOracle for StateBoundOracle {
    fn find_counterexample(&mut self, h: &MealyMachine, mq: &mut dyn MembershipOracle) -> Result<EqOutcome> {
        state_bound_equivalence(h, self.b_state, mq, self.budget)
    }
}
