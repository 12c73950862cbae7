use std::sync::Arc;

use super::{AsyncInterface, Invocation};
use crate::alphabet::{Alphabet, Input, Output};
use crate::error::Result;
use crate::oracle::ReferenceSystem;

/// Request-response component with an unbounded queue: every request is
/// accepted and queues one response. Its trace set is not regular.
#[derive(Clone, Debug)]
pub struct CounterSul {
    callins: Vec<String>,
    callbacks: Vec<String>,
    pending: u64,
}

impl CounterSul {
    pub fn new(request: &str, response: &str) -> Result<Self> {
        Alphabet::closed([request], [response])?;
        Ok(CounterSul {
            callins: vec![request.to_string()],
            callbacks: vec![response.to_string()],
            pending: 0,
        })
    }

    pub fn pending(&self) -> u64 {
        self.pending
    }
}

impl AsyncInterface for CounterSul {
    fn callins(&self) -> &[String] {
        &self.callins
    }

    fn callbacks(&self) -> &[String] {
        &self.callbacks
    }

    fn reset(&mut self) {
        self.pending = 0;
    }

    fn invoke(&mut self, _callin: usize) -> Invocation {
        self.pending += 1;
        Invocation::Accepted
    }

    fn wait(&mut self) -> Option<usize> {
        if self.pending == 0 {
            return None;
        }
        self.pending -= 1;
        Some(0)
    }
}

/// The closure semantics of [`CounterSul`] as an explorable reference; the
/// configuration is the number of queued responses.
#[derive(Clone, Debug)]
pub struct CounterReference {
    alphabet: Arc<Alphabet>,
}

impl CounterReference {
    pub fn new(sul: &CounterSul) -> Self {
        CounterReference {
            alphabet: Arc::new(Alphabet::closed(&sul.callins, &sul.callbacks).unwrap()),
        }
    }
}

impl ReferenceSystem for CounterReference {
    type Config = u64;

    fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    fn initial(&self) -> u64 {
        0
    }

    fn step(&self, c: &u64, i: Input) -> (u64, Output) {
        let a = &self.alphabet;
        if Some(i) == a.wait() {
            match *c {
                0 => (0, a.quiet().unwrap()),
                n => (n - 1, Output(0)),
            }
        } else {
            (c + 1, a.lambda().unwrap())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::words_up_to;
    use crate::closure::ClosureOracle;
    use crate::oracle::MembershipOracle;

    #[test]
    fn reference_matches_simulation() {
        let sul = CounterSul::new("get", "onGetSuggestions").unwrap();
        let r = CounterReference::new(&sul);
        let mut oracle = ClosureOracle::new(sul).unwrap();
        for w in words_up_to(2, 8) {
            assert_eq!(oracle.query(&w).unwrap(), r.run(&w));
        }
    }

    #[test]
    fn queues_every_request() {
        let mut sul = CounterSul::new("get", "onGetSuggestions").unwrap();
        for _ in 0..3 {
            sul.invoke(0);
        }
        assert_eq!(sul.pending(), 3);
        assert_eq!(
            (0..4).map(|_| sul.wait()).collect::<Vec<_>>(),
            [Some(0), Some(0), Some(0), None]
        );
    }
}
