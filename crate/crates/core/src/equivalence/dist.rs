use std::collections::VecDeque;

use super::{EqOutcome, EquivalenceOracle, Split};
use crate::alphabet::{words_of_length, Input, Output, Word};
use crate::error::Result;
use crate::mealy::MealyMachine;
use crate::oracle::MembershipOracle;

/// Shortest access word per hypothesis state, ties broken by input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representatives {
    pub words: Vec<Word>,
}

impl Representatives {
    pub fn get(&self, q: usize) -> &Word {
        &self.words[q]
    }
}

/// BFS in input order: the queue stays sorted by (length, lex), so the first
/// word to reach a state is its least shortest access word.
pub fn representatives(h: &MealyMachine) -> Representatives {
    let mut words: Vec<Option<Word>> = vec![None; h.state_count()];
    words[h.initial()] = Some(Vec::new());
    let mut queue = VecDeque::from([h.initial()]);
    while let Some(q) = queue.pop_front() {
        for i in h.alphabet().input_ids() {
            let t = h.next(q, i);
            if words[t].is_none() {
                let mut w = words[q].clone().unwrap();
                w.push(i);
                words[t] = Some(w);
                queue.push_back(t);
            }
        }
    }
    Representatives {
        words: words
            .into_iter()
            .map(|w| w.expect("hypotheses are reachable"))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistOptions {
    /// Skip the suffix check behind `wait`/`quiet` self-loops.
    pub skip_quiet: bool,
    /// Skip the suffix check behind transitions into an absorbing sink.
    pub skip_err: bool,
    /// Extend uncached queries to `R(p)·x` with `|x| = B + 1`, so that all
    /// executed words come from a set of `|Q|·|Σ|^(B+1)` words.
    pub pad: bool,
}

impl Default for DistOptions {
    fn default() -> Self {
        DistOptions {
            skip_quiet: true,
            skip_err: true,
            pad: true,
        }
    }
}

struct Asker<'a> {
    mq: &'a mut dyn MembershipOracle,
    b: usize,
    pad: bool,
}

impl Asker<'_> {
    /// Query `base·x`, where `base` is a representative.
    fn ask(&mut self, base: &[Input], x: &[Input]) -> Result<Vec<Output>> {
        let mut w = base.to_vec();
        w.extend_from_slice(x);
        if !self.pad || x.len() > self.b || self.mq.is_cached(&w) {
            return self.mq.query(&w);
        }
        let len = w.len();
        w.resize(base.len() + self.b + 1, Input(0));
        let mut out = self.mq.query(&w)?;
        out.truncate(len);
        Ok(out)
    }

    /// Enumerate suffixes by length then lex order; the first on which the
    /// outputs after `base·x` and `base2` differ.
    fn check(&mut self, base: &[Input], x: &[Input], base2: &[Input], n: usize) -> Result<Option<Word>> {
        for len in 1..=self.b {
            for s in words_of_length(n, len) {
                let mut left = x.to_vec();
                left.extend_from_slice(&s);
                let l = self.ask(base, &left)?;
                let r = self.ask(base2, &s)?;
                if l[l.len() - len..] != r[r.len() - len..] {
                    return Ok(Some(s));
                }
            }
        }
        Ok(None)
    }
}

/// `check(w, w')`: the first suffix of length `1..=b` after which the oracle
/// answers `w` and `w'` differently.
pub fn check(w: &[Input], w2: &[Input], b: usize, mq: &mut dyn MembershipOracle) -> Result<Option<Word>> {
    let n = mq.alphabet().input_count();
    let mut asker = Asker { mq, b, pad: false };
    asker.check(w, &[], w2, n)
}

/// Equivalence oracle from membership queries, complete whenever the
/// target's distinguisher bound is at most `b`.
///
/// For every transition `q --i--> q'` it compares the output on `R(q)·i`,
/// then checks that `R(q)·i` and `R(q')` agree on all suffixes up to
/// length `b`.
pub fn dist_equivalence(
    h: &MealyMachine,
    b: usize,
    mq: &mut dyn MembershipOracle,
    opts: DistOptions,
) -> Result<EqOutcome> {
    let reps = representatives(h);
    let alphabet = h.alphabet_arc().clone();
    let n = alphabet.input_count();
    let mut asker = Asker { mq, b, pad: opts.pad };
    for q in 0..h.state_count() {
        let rq = reps.get(q);
        for i in alphabet.input_ids() {
            let (t, o) = h.step(q, i);
            let out = asker.ask(rq, &[i])?;
            if *out.last().unwrap() != o {
                let mut w = rq.clone();
                w.push(i);
                return Ok(EqOutcome::cex(w));
            }
            let quiet_loop = Some(i) == alphabet.wait() && Some(o) == alphabet.quiet() && t == q;
            let into_sink = alphabet.is_absorbing(o) && h.is_sink(t, o);
            if (opts.skip_quiet && quiet_loop) || (opts.skip_err && into_sink) {
                continue;
            }
            let rt = reps.get(t);
            let Some(suffix) = asker.check(rq, &[i], rt, n)? else {
                continue;
            };
            let split = Split {
                state: q,
                input: i,
                target: t,
                suffix: suffix.clone(),
            };
            let mut left = rq.clone();
            left.push(i);
            left.extend_from_slice(&suffix);
            let mut x = vec![i];
            x.extend_from_slice(&suffix);
            let answer = asker.ask(rq, &x)?;
            let word = if answer != h.mealy_output(&left)? {
                left
            } else {
                let mut right = rt.clone();
                right.extend_from_slice(&suffix);
                right
            };
            return Ok(EqOutcome::Counterexample {
                word,
                split: Some(split),
            });
        }
    }
    Ok(EqOutcome::Correct)
}

/// Per-call bookkeeping for [`DistOracle`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistCall {
    pub hypothesis_states: usize,
    pub executed: u64,
    pub budget: u128,
}

#[derive(Clone, Debug)]
pub struct DistOracle {
    pub b: usize,
    pub options: DistOptions,
    pub calls: Vec<DistCall>,
}

impl DistOracle {
    pub fn new(b: usize) -> Self {
        DistOracle {
            b,
            options: DistOptions::default(),
            calls: Vec::new(),
        }
    }

    /// `|Q|·|Σ|^(b+1)`, saturating.
    pub fn budget(states: usize, inputs: usize, b: usize) -> u128 {
        (inputs as u128)
            .checked_pow(b as u32 + 1)
            .and_then(|p| p.checked_mul(states as u128))
            .unwrap_or(u128::MAX)
    }
}

impl EquivalenceOracle for DistOracle {
    fn find_counterexample(&mut self, h: &MealyMachine, mq: &mut dyn MembershipOracle) -> Result<EqOutcome> {
        let before = mq.counters();
        let outcome = dist_equivalence(h, self.b, mq, self.options)?;
        self.calls.push(DistCall {
            hypothesis_states: h.state_count(),
            executed: (mq.counters() - before).executed,
            budget: Self::budget(h.state_count(), h.alphabet().input_count(), self.b),
        });
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{words_up_to, Alphabet};
    use crate::oracle::MealyOracle;
    use crate::random::random_minimal_mealy;
    use std::sync::Arc;

    #[test]
    fn representatives_are_shortest_and_least() {
        for seed in 0..30 {
            let m = random_minimal_mealy(6, 3, 2, seed).unwrap();
            let reps = representatives(&m);
            assert!(reps.get(m.initial()).is_empty());
            for q in 0..m.state_count() {
                let oracle = words_up_to(3, 6).find(|w| m.state_after(m.initial(), w) == q).unwrap();
                assert_eq!(reps.get(q), &oracle);
            }
        }
    }

    #[test]
    fn check_identical_words() {
        let m = random_minimal_mealy(4, 2, 2, 5).unwrap();
        let mut o = MealyOracle::new(m);
        assert_eq!(check(&[Input(0)], &[Input(0)], 2, &mut o).unwrap(), None);
    }

    #[test]
    fn check_finds_single_input_distinguisher() {
        let a = Arc::new(Alphabet::plain(["a", "b"], ["x", "y"]).unwrap());
        // a toggles, b reports
        let t = MealyMachine::from_fn(a, 2, 0, |q, i| match i.0 {
            0 => (1 - q, Output(0)),
            _ => (q, Output(q as u16)),
        });
        let mut o = MealyOracle::new(t);
        assert_eq!(check(&[Input(0)], &[], 2, &mut o).unwrap(), Some(vec![Input(1)]));
    }
}
