//! Mealy machines over an [`Alphabet`] and the exact trace-equivalence check.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::alphabet::{Alphabet, Input, Output, Word};
use crate::error::{Error, Result};

type Pair = (usize, usize);

/// Outcome of an equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Correct,
    Counterexample(Word),
}

impl Verdict {
    pub fn is_correct(&self) -> bool {
        matches!(self, Verdict::Correct)
    }

    pub fn counterexample(&self) -> Option<&Word> {
        match self {
            Verdict::Correct => None,
            Verdict::Counterexample(w) => Some(w),
        }
    }
}

/// A complete deterministic Mealy machine. State ids are dense `usize`s;
/// human-readable names are kept on the side for export.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyMachine {
    alphabet: Arc<Alphabet>,
    initial: usize,
    delta: Vec<u32>,
    out: Vec<Output>,
    names: Vec<String>,
}

impl MealyMachine {
    /// Build a machine from a total transition/output function.
    pub fn from_fn<F>(alphabet: Arc<Alphabet>, states: usize, initial: usize, mut f: F) -> Self
    where
        F: FnMut(usize, Input) -> (usize, Output),
    {
        assert!(states > 0 && initial < states);
        let n = alphabet.input_count();
        let mut delta = Vec::with_capacity(states * n);
        let mut out = Vec::with_capacity(states * n);
        for q in 0..states {
            for i in alphabet.input_ids() {
                let (t, o) = f(q, i);
                assert!(t < states, "transition target {t} out of range");
                assert!(o.index() < alphabet.output_count());
                delta.push(t as u32);
                out.push(o);
            }
        }
        MealyMachine {
            alphabet,
            initial,
            delta,
            out,
            names: (0..states).map(|q| format!("q{q}")).collect(),
        }
    }

    /// Build from a partial table, rejecting missing or duplicate entries.
    pub fn from_transitions(
        alphabet: Arc<Alphabet>,
        names: Vec<String>,
        initial: usize,
        transitions: &[(usize, Input, Output, usize)],
    ) -> Result<Self> {
        let n = alphabet.input_count();
        let states = names.len();
        if states == 0 || initial >= states {
            return Err(Error::Model(
                "machine needs at least one state and a valid initial state".into(),
            ));
        }
        let mut table: Vec<Option<(u32, Output)>> = vec![None; states * n];
        for &(q, i, o, t) in transitions {
            if q >= states || t >= states {
                return Err(Error::UnknownState(format!("{}", q.max(t))));
            }
            if !alphabet.contains_input(i) {
                return Err(Error::InputDomain(i.0));
            }
            let slot = &mut table[q * n + i.index()];
            if slot.is_some() {
                return Err(Error::DuplicateTransition {
                    state: names[q].clone(),
                    symbol: alphabet.input_name(i).to_string(),
                });
            }
            *slot = Some((t as u32, o));
        }
        let mut delta = Vec::with_capacity(states * n);
        let mut out = Vec::with_capacity(states * n);
        for (k, entry) in table.into_iter().enumerate() {
            let (t, o) = entry.ok_or_else(|| Error::IncompleteMachine {
                state: names[k / n].clone(),
                input: alphabet.input_name(Input((k % n) as u16)).to_string(),
            })?;
            delta.push(t);
            out.push(o);
        }
        Ok(MealyMachine {
            alphabet,
            initial,
            delta,
            out,
            names,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_arc(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn with_state_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.names.len());
        self.names = names;
        self
    }

    #[inline]
    pub fn next(&self, q: usize, i: Input) -> usize {
        self.delta[q * self.alphabet.input_count() + i.index()] as usize
    }

    #[inline]
    pub fn output(&self, q: usize, i: Input) -> Output {
        self.out[q * self.alphabet.input_count() + i.index()]
    }

    pub fn step(&self, q: usize, i: Input) -> (usize, Output) {
        (self.next(q, i), self.output(q, i))
    }

    /// State reached from `q` on `w` (no domain check).
    pub fn state_after(&self, q: usize, w: &[Input]) -> usize {
        w.iter().fold(q, |q, &i| self.next(q, i))
    }

    /// Outputs produced from state `q` on `w` (no domain check).
    pub fn outputs_from(&self, mut q: usize, w: &[Input]) -> Vec<Output> {
        let mut outs = Vec::with_capacity(w.len());
        for &i in w {
            outs.push(self.output(q, i));
            q = self.next(q, i);
        }
        outs
    }

    /// `Out(q_init, w)`; fails if `w` mentions an input outside the alphabet.
    pub fn mealy_output(&self, w: &[Input]) -> Result<Vec<Output>> {
        if let Some(bad) = w.iter().find(|i| !self.alphabet.contains_input(**i)) {
            return Err(Error::InputDomain(bad.0));
        }
        Ok(self.outputs_from(self.initial, w))
    }

    /// Run on input names; unknown names are an input-domain error.
    pub fn output_names(&self, w: &[&str]) -> Result<Vec<String>> {
        let word = self.alphabet.word_from_names(w)?;
        let out = self.mealy_output(&word)?;
        Ok(self.alphabet.output_names(&out))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, Input, Output, usize)> + '_ {
        (0..self.state_count()).flat_map(move |q| {
            self.alphabet
                .input_ids()
                .map(move |i| (q, i, self.output(q, i), self.next(q, i)))
        })
    }

    /// States reachable from the initial state, in BFS order.
    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for i in self.alphabet.input_ids() {
                let t = self.next(q, i);
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
        }
        order
    }

    /// True if every input at `q` outputs `o` and loops back to `q`.
    pub fn is_sink(&self, q: usize, o: Output) -> bool {
        self.alphabet
            .input_ids()
            .all(|i| self.next(q, i) == q && self.output(q, i) == o)
    }

    /// Checks the err-sink invariant: every state entered by an absorbing
    /// output (`err`/`oop`) self-loops emitting that output on every input.
    pub fn check_err_sink(&self) -> Result<()> {
        for (_, _, o, t) in self.transitions() {
            if self.alphabet.is_absorbing(o) && !self.is_sink(t, o) {
                return Err(Error::ErrSinkViolation(t));
            }
        }
        Ok(())
    }

    /// Exact trace equivalence by BFS over the product machine.
    ///
    /// Returns the lexicographically least among the shortest distinguishing
    /// words. Such a word has length at most `|Q1| + |Q2| - 1`.
    pub fn traces_equal(&self, other: &MealyMachine) -> Result<Verdict> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let start = (self.initial, other.initial);
        let mut parent: HashMap<Pair, Option<(Pair, Input)>> = HashMap::new();
        parent.insert(start, None);
        let mut queue = VecDeque::from([start]);
        while let Some(pair @ (p, q)) = queue.pop_front() {
            for i in self.alphabet.input_ids() {
                if self.output(p, i) != other.output(q, i) {
                    let mut word = vec![i];
                    let mut cur = pair;
                    while let Some(Some((prev, j))) = parent.get(&cur) {
                        word.push(*j);
                        cur = *prev;
                    }
                    word.reverse();
                    return Ok(Verdict::Counterexample(word));
                }
                let next = (self.next(p, i), other.next(q, i));
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some((pair, i)));
                    queue.push_back(next);
                }
            }
        }
        Ok(Verdict::Correct)
    }

    /// Copy with the output of one transition replaced.
    pub fn with_output(&self, q: usize, i: Input, o: Output) -> Self {
        let mut m = self.clone();
        let n = m.alphabet.input_count();
        m.out[q * n + i.index()] = o;
        m
    }

    /// Copy with the target of one transition replaced.
    pub fn with_target(&self, q: usize, i: Input, t: usize) -> Self {
        let mut m = self.clone();
        let n = m.alphabet.input_count();
        m.delta[q * n + i.index()] = t as u32;
        m
    }
}
