//! Synchronous closure of an interface automaton.
//!
//! Inputs and outputs are forced to alternate: an enabled callin answers
//! `lambda`, `wait` answers the pending callback (or `quiet`), and a disabled
//! callin answers `err` and moves to an absorbing sink.
//!
//! The Mealy state is the interface state itself. Whether a callback is
//! pending is a function of that state (at most one callback per state), so
//! no extra flag state is needed and an input taken while a callback is
//! pending simply follows the source automaton's input edge.

use std::sync::Arc;

use crate::alphabet::{Alphabet, Input, Output};
use crate::error::Result;
use crate::interface::InterfaceAutomaton;
use crate::mealy::MealyMachine;
use crate::oracle::MembershipOracle;
use crate::sul::{AsyncInterface, Invocation};

/// What a closure state stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureState {
    /// An interface state and its pending callback, if any.
    Interface {
        state: usize,
        pending: Option<usize>,
    },
    ErrSink,
}

#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub machine: MealyMachine,
    pub state_map: Vec<ClosureState>,
    pub err_sink: usize,
}

/// The closed alphabet of an interface automaton.
pub fn closed_alphabet(a: &InterfaceAutomaton) -> Arc<Alphabet> {
    Arc::new(Alphabet::closed(a.callins(), a.callbacks()).expect("interface automaton symbols are already validated"))
}

/// Build the closure machine. Unreachable interface states are dropped
/// first; the err-sink is always the last state.
pub fn closure(a: &InterfaceAutomaton) -> ClosureResult {
    let a = a.normalized();
    let alphabet = closed_alphabet(&a);
    let wait = alphabet.wait().unwrap();
    let quiet = alphabet.quiet().unwrap();
    let lambda = alphabet.lambda().unwrap();
    let err = alphabet.err().unwrap();
    let n = a.state_count();
    let sink = n;
    let machine = MealyMachine::from_fn(alphabet, n + 1, a.initial(), |q, i| {
        if q == sink {
            return (sink, err);
        }
        if i == wait {
            return match a.pending(q) {
                Some((cb, t)) => (t, Output(cb as u16)),
                None => (q, quiet),
            };
        }
        match a.on_callin(q, i.index()) {
            Some(t) => (t, lambda),
            None => (sink, err),
        }
    });
    let mut names: Vec<String> = a.state_names().to_vec();
    names.push("err".to_string());
    let mut state_map: Vec<ClosureState> = (0..n)
        .map(|s| ClosureState::Interface {
            state: s,
            pending: a.pending(s).map(|(cb, _)| cb),
        })
        .collect();
    state_map.push(ClosureState::ErrSink);
    ClosureResult {
        machine: machine.with_state_names(names),
        state_map,
        err_sink: sink,
    }
}

/// Membership oracle over the closed alphabet backed by an asynchronous
/// system. Every query starts from a reset.
pub struct ClosureOracle<S> {
    sul: S,
    alphabet: Arc<Alphabet>,
}

impl<S: AsyncInterface> ClosureOracle<S> {
    pub fn new(sul: S) -> Result<Self> {
        let alphabet = Arc::new(Alphabet::closed(sul.callins(), sul.callbacks())?);
        Ok(ClosureOracle { sul, alphabet })
    }

    pub fn into_inner(self) -> S {
        self.sul
    }
}

impl<S: AsyncInterface> MembershipOracle for ClosureOracle<S> {
    fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    fn query(&mut self, w: &[Input]) -> Result<Vec<Output>> {
        let a = &self.alphabet;
        let (wait, quiet, lambda, err) = (
            a.wait().unwrap(),
            a.quiet().unwrap(),
            a.lambda().unwrap(),
            a.err().unwrap(),
        );
        self.sul.reset();
        let mut out = Vec::with_capacity(w.len());
        let mut failed = false;
        for &i in w {
            if !a.contains_input(i) {
                return Err(crate::error::Error::InputDomain(i.0));
            }
            let o = if failed {
                err
            } else if i == wait {
                self.sul.wait().map_or(quiet, |cb| Output(cb as u16))
            } else {
                match self.sul.invoke(i.index()) {
                    Invocation::Accepted => lambda,
                    Invocation::Rejected => {
                        failed = true;
                        err
                    }
                }
            };
            out.push(o);
        }
        Ok(out)
    }
}
