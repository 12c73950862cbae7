use std::collections::{HashMap, VecDeque};

use super::{EqOutcome, EquivalenceOracle};
use crate::alphabet::{Input, Word};
use crate::error::{Error, Result};
use crate::mealy::{MealyMachine, Verdict};
use crate::oracle::{MembershipOracle, ReferenceSystem};

/// Exact check against a known target machine.
pub fn perfect_equivalence(h: &MealyMachine, target: &MealyMachine) -> Result<Verdict> {
    h.traces_equal(target)
}

/// Shortest, least distinguishing word between `h` and a reference system,
/// by BFS over the product. Terminates whenever the product is finite or the
/// two differ.
pub fn reference_counterexample<R: ReferenceSystem>(h: &MealyMachine, r: &R) -> Result<Option<Word>> {
    if h.alphabet() != r.alphabet().as_ref() {
        return Err(Error::AlphabetMismatch);
    }
    type Key<C> = (usize, C);
    let start: Key<R::Config> = (h.initial(), r.initial());
    let mut nodes: Vec<Key<R::Config>> = vec![start.clone()];
    let mut parent: Vec<Option<(usize, Input)>> = vec![None];
    let mut index: HashMap<Key<R::Config>, usize> = HashMap::from([(start, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let (q, c) = nodes[k].clone();
        for i in h.alphabet().input_ids() {
            let (c2, o) = r.step(&c, i);
            if h.output(q, i) != o {
                let mut word = vec![i];
                let mut cur = k;
                while let Some((p, j)) = parent[cur] {
                    word.push(j);
                    cur = p;
                }
                word.reverse();
                return Ok(Some(word));
            }
            let key = (h.next(q, i), c2);
            if !index.contains_key(&key) {
                index.insert(key.clone(), nodes.len());
                nodes.push(key);
                parent.push(Some((k, i)));
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    Ok(None)
}

/// Equivalence oracle with full knowledge of the target. Issues no
/// membership queries.
pub struct PerfectOracle<R> {
    reference: R,
}

impl<R: ReferenceSystem> PerfectOracle<R> {
    pub fn new(reference: R) -> Self {
        PerfectOracle { reference }
    }
}

impl<R: ReferenceSystem> EquivalenceOracle for PerfectOracle<R> {
    fn find_counterexample(&mut self, h: &MealyMachine, _mq: &mut dyn MembershipOracle) -> Result<EqOutcome> {
        Ok(match reference_counterexample(h, &self.reference)? {
            None => EqOutcome::Correct,
            Some(w) => EqOutcome::cex(w),
        })
    }
}
