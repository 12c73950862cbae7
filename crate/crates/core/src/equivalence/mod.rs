//! Equivalence oracles: the distinguisher-bound oracle, the exhaustive
//! state-bound baseline, and a perfect oracle over a known reference.

mod dist;
mod perfect;
mod state_bound;

pub use dist::{check, dist_equivalence, representatives, DistCall, DistOptions, DistOracle, Representatives};
pub use perfect::{perfect_equivalence, reference_counterexample, PerfectOracle};
pub use state_bound::{state_bound_equivalence, theoretical_words, StateBoundOracle};

use crate::alphabet::{Input, Word};
use crate::error::{Error, Result};
use crate::mealy::{MealyMachine, Verdict};
use crate::oracle::MembershipOracle;

/// A suffix that separates `R(state)·input` from `R(target)` on the system,
/// although the hypothesis maps both to `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub state: usize,
    pub input: Input,
    pub target: usize,
    pub suffix: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqOutcome {
    Correct,
    Counterexample { word: Word, split: Option<Split> },
}

impl EqOutcome {
    pub fn cex(word: Word) -> Self {
        EqOutcome::Counterexample { word, split: None }
    }

    pub fn verdict(&self) -> Verdict {
        match self {
            EqOutcome::Correct => Verdict::Correct,
            EqOutcome::Counterexample { word, .. } => Verdict::Counterexample(word.clone()),
        }
    }

    pub fn is_correct(&self) -> bool {
        matches!(self, EqOutcome::Correct)
    }
}

pub trait EquivalenceOracle {
    fn find_counterexample(&mut self, h: &MealyMachine, mq: &mut dyn MembershipOracle) -> Result<EqOutcome>;
}

/// Bound configuration. With only a state bound, the distinguisher bound
/// defaults to `b_state - 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bounds {
    pub b_dist: Option<usize>,
    pub b_state: Option<usize>,
}

impl Bounds {
    pub fn dist(b: usize) -> Self {
        Bounds {
            b_dist: Some(b),
            b_state: None,
        }
    }

    pub fn state(b: usize) -> Self {
        Bounds {
            b_dist: None,
            b_state: Some(b),
        }
    }

    pub fn resolved_dist(&self) -> Result<usize> {
        match (self.b_dist, self.b_state) {
            (Some(b), _) => Ok(b),
            (None, Some(s)) if s >= 1 => Ok(s - 1),
            _ => Err(Error::Model("a distinguisher or state bound is required".into())),
        }
    }
}
