//! Learning purposes: restrict a possibly non-regular system to a regular
//! fragment by cutting queries off where an input-only automaton rejects.

use std::sync::Arc;

use crate::alphabet::{Alphabet, Input, Output};
use crate::error::{Error, Result};
use crate::oracle::{MembershipOracle, QueryCounters, ReferenceSystem};

/// Deterministic automaton over the closed inputs. Rejecting states are
/// absorbing; a missing transition out of a rejecting state is a self-loop,
/// out of an accepting state it is an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearningPurpose {
    inputs: Vec<String>,
    states: Vec<String>,
    initial: usize,
    accepting: Vec<bool>,
    delta: Vec<Vec<usize>>,
}

impl LearningPurpose {
    pub fn new<S: AsRef<str>>(
        inputs: &[S],
        states: &[S],
        initial: &str,
        accepting: &[S],
        transitions: &[(S, S, S)],
    ) -> Result<Self> {
        let fail = |m: String| Err(Error::Purpose(m));
        let inputs: Vec<String> = inputs.iter().map(|s| s.as_ref().to_string()).collect();
        let states: Vec<String> = states.iter().map(|s| s.as_ref().to_string()).collect();
        let state = |n: &str| states.iter().position(|s| s == n);
        let Some(initial) = state(initial) else {
            return fail(format!("unknown initial state {initial}"));
        };
        let mut is_accepting = vec![false; states.len()];
        for s in accepting {
            match state(s.as_ref()) {
                Some(k) => is_accepting[k] = true,
                None => return fail(format!("unknown accepting state {}", s.as_ref())),
            }
        }
        if !is_accepting[initial] {
            return fail("initial state must be accepting".into());
        }
        let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; inputs.len()]; states.len()];
        for (from, sym, to) in transitions {
            let (Some(f), Some(t)) = (state(from.as_ref()), state(to.as_ref())) else {
                return fail(format!(
                    "unknown state in {} --{}--> {}",
                    from.as_ref(),
                    sym.as_ref(),
                    to.as_ref()
                ));
            };
            let Some(i) = inputs.iter().position(|x| x == sym.as_ref()) else {
                return fail(format!("unknown input {}", sym.as_ref()));
            };
            if delta[f][i].replace(t).is_some() {
                return fail(format!("two transitions from {} on {}", from.as_ref(), sym.as_ref()));
            }
            if !is_accepting[f] && t != f {
                return fail(format!("rejecting state {} must be absorbing", from.as_ref()));
            }
        }
        let mut total = Vec::with_capacity(states.len());
        for (s, row) in delta.into_iter().enumerate() {
            let mut out = Vec::with_capacity(inputs.len());
            for (i, t) in row.into_iter().enumerate() {
                match (t, is_accepting[s]) {
                    (Some(t), _) => out.push(t),
                    (None, false) => out.push(s),
                    (None, true) => {
                        return fail(format!(
                            "accepting state {} has no transition on {}",
                            states[s], inputs[i]
                        ))
                    }
                }
            }
            total.push(out);
        }
        Ok(LearningPurpose {
            inputs,
            states,
            initial,
            accepting: is_accepting,
            delta: total,
        })
    }

    /// The purpose that never rejects.
    pub fn accept_all(alphabet: &Alphabet) -> Self {
        let inputs: Vec<String> = alphabet.inputs().iter().map(|s| s.name().to_string()).collect();
        LearningPurpose {
            delta: vec![vec![0; inputs.len()]],
            inputs,
            states: vec!["all".into()],
            initial: 0,
            accepting: vec![true],
        }
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn step(&self, s: usize, input: usize) -> usize {
        self.delta[s][input]
    }

    /// Position of each alphabet input in the purpose's input list.
    fn input_map(&self, alphabet: &Alphabet) -> Result<Vec<usize>> {
        let map = alphabet
            .inputs()
            .iter()
            .map(|sym| {
                self.inputs
                    .iter()
                    .position(|x| x == sym.name())
                    .ok_or_else(|| Error::Purpose(format!("purpose does not cover input {}", sym.name())))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = self.inputs.iter().find(|x| alphabet.input(x).is_err()) {
            return Err(Error::Purpose(format!(
                "purpose input {extra} is not an input of the system"
            )));
        }
        Ok(map)
    }
}

/// Membership oracle that answers `oop` from the first input that leaves the
/// purpose onwards. The inner oracle only sees the in-purpose prefix.
pub struct PurposeFilter<O> {
    inner: O,
    purpose: LearningPurpose,
    map: Vec<usize>,
    alphabet: Arc<Alphabet>,
}

impl<O: MembershipOracle> PurposeFilter<O> {
    pub fn new(inner: O, purpose: LearningPurpose) -> Result<Self> {
        let alphabet = Arc::new(inner.alphabet().with_oop()?);
        let map = purpose.input_map(&alphabet)?;
        Ok(PurposeFilter {
            inner,
            purpose,
            map,
            alphabet,
        })
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: MembershipOracle> MembershipOracle for PurposeFilter<O> {
    fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    fn query(&mut self, w: &[Input]) -> Result<Vec<Output>> {
        let mut p = self.purpose.initial;
        let mut cut = w.len();
        for (k, i) in w.iter().enumerate() {
            if !self.alphabet.contains_input(*i) {
                return Err(Error::InputDomain(i.0));
            }
            p = self.purpose.step(p, self.map[i.index()]);
            if !self.purpose.is_accepting(p) {
                cut = k;
                break;
            }
        }
        let mut out = self.inner.query(&w[..cut])?;
        out.resize(w.len(), self.alphabet.oop().unwrap());
        Ok(out)
    }

    fn counters(&self) -> QueryCounters {
        self.inner.counters()
    }
}

/// A reference system seen through a purpose. Configurations past the cut
/// collapse into a single `oop` sink so finite fragments stay finite.
pub struct PurposeReference<R> {
    inner: R,
    purpose: LearningPurpose,
    map: Vec<usize>,
    alphabet: Arc<Alphabet>,
}

impl<R: ReferenceSystem> PurposeReference<R> {
    pub fn new(inner: R, purpose: LearningPurpose) -> Result<Self> {
        let alphabet = Arc::new(inner.alphabet().with_oop()?);
        let map = purpose.input_map(&alphabet)?;
        Ok(PurposeReference {
            inner,
            purpose,
            map,
            alphabet,
        })
    }
}

impl<R: ReferenceSystem> ReferenceSystem for PurposeReference<R> {
    type Config = Option<(usize, R::Config)>;

    fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    fn initial(&self) -> Self::Config {
        Some((self.purpose.initial, self.inner.initial()))
    }

    fn step(&self, c: &Self::Config, i: Input) -> (Self::Config, Output) {
        let oop = self.alphabet.oop().unwrap();
        let Some((p, inner)) = c else {
            return (None, oop);
        };
        let p2 = self.purpose.step(*p, self.map[i.index()]);
        if !self.purpose.is_accepting(p2) {
            return (None, oop);
        }
        let (inner2, o) = self.inner.step(inner, i);
        (Some((p2, inner2)), o)
    }
}
