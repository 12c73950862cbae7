//! Membership oracles and reference systems.

use std::hash::Hash;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Input, Output};
use crate::error::{Error, Result};
use crate::mealy::MealyMachine;

/// Query counters. `asked` counts every query issued, `executed` only those
/// that reached the system under learning.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryCounters {
    pub asked: u64,
    pub executed: u64,
}

impl std::ops::Sub for QueryCounters {
    type Output = QueryCounters;
    fn sub(self, rhs: Self) -> Self {
        QueryCounters {
            asked: self.asked - rhs.asked,
            executed: self.executed - rhs.executed,
        }
    }
}

/// Answers a word with one output per input, always from the initial state.
pub trait MembershipOracle {
    fn alphabet(&self) -> &Arc<Alphabet>;

    fn query(&mut self, w: &[Input]) -> Result<Vec<Output>>;

    /// Whether `w` can be answered without running the system.
    fn is_cached(&self, _w: &[Input]) -> bool {
        false
    }

    fn counters(&self) -> QueryCounters {
        QueryCounters::default()
    }
}

impl<O: MembershipOracle + ?Sized> MembershipOracle for &mut O {
    fn alphabet(&self) -> &Arc<Alphabet> {
        (**self).alphabet()
    }
    fn query(&mut self, w: &[Input]) -> Result<Vec<Output>> {
        (**self).query(w)
    }
    fn is_cached(&self, w: &[Input]) -> bool {
        (**self).is_cached(w)
    }
    fn counters(&self) -> QueryCounters {
        (**self).counters()
    }
}

impl<O: MembershipOracle + ?Sized> MembershipOracle for Box<O> {
    fn alphabet(&self) -> &Arc<Alphabet> {
        (**self).alphabet()
    }
    fn query(&mut self, w: &[Input]) -> Result<Vec<Output>> {
        (**self).query(w)
    }
    fn is_cached(&self, w: &[Input]) -> bool {
        (**self).is_cached(w)
    }
    fn counters(&self) -> QueryCounters {
        (**self).counters()
    }
}

/// Oracle answering from a known machine.
#[derive(Clone, Debug)]
pub struct MealyOracle {
    machine: MealyMachine,
}

impl MealyOracle {
    pub fn new(machine: MealyMachine) -> Self {
        MealyOracle { machine }
    }

    pub fn machine(&self) -> &MealyMachine {
        &self.machine
    }
}

impl MembershipOracle for MealyOracle {
    fn alphabet(&self) -> &Arc<Alphabet> {
        self.machine.alphabet_arc()
    }

    fn query(&mut self, w: &[Input]) -> Result<Vec<Output>> {
        self.machine.mealy_output(w)
    }
}

/// A deterministic system that can be explored configuration by
/// configuration. Unlike a [`MealyMachine`] the configuration space may be
/// infinite.
pub trait ReferenceSystem {
    type Config: Clone + Eq + Hash;

    fn alphabet(&self) -> &Arc<Alphabet>;
    fn initial(&self) -> Self::Config;
    fn step(&self, c: &Self::Config, i: Input) -> (Self::Config, Output);

    fn run(&self, w: &[Input]) -> Vec<Output> {
        let mut c = self.initial();
        w.iter()
            .map(|&i| {
                let (next, o) = self.step(&c, i);
                c = next;
                o
            })
            .collect()
    }

    /// The underlying machine when the system is a finite Mealy machine.
    fn as_machine(&self) -> Option<&MealyMachine> {
        None
    }
}

impl<R: ReferenceSystem> ReferenceSystem for &R {
    type Config = R::Config;

    fn alphabet(&self) -> &Arc<Alphabet> {
        (**self).alphabet()
    }
    fn initial(&self) -> R::Config {
        (**self).initial()
    }
    fn step(&self, c: &R::Config, i: Input) -> (R::Config, Output) {
        (**self).step(c, i)
    }
    fn as_machine(&self) -> Option<&MealyMachine> {
        (**self).as_machine()
    }
}

impl ReferenceSystem for MealyMachine {
    type Config = usize;

    fn alphabet(&self) -> &Arc<Alphabet> {
        self.alphabet_arc()
    }
    fn initial(&self) -> usize {
        MealyMachine::initial(self)
    }
    fn step(&self, c: &usize, i: Input) -> (usize, Output) {
        MealyMachine::step(self, *c, i)
    }
    fn as_machine(&self) -> Option<&MealyMachine> {
        Some(self)
    }
}

/// Membership oracle over any reference system.
pub struct ReferenceOracle<R> {
    reference: R,
}

impl<R: ReferenceSystem> ReferenceOracle<R> {
    pub fn new(reference: R) -> Self {
        ReferenceOracle { reference }
    }
}

impl<R: ReferenceSystem> MembershipOracle for ReferenceOracle<R> {
    fn alphabet(&self) -> &Arc<Alphabet> {
        self.reference.alphabet()
    }

    fn query(&mut self, w: &[Input]) -> Result<Vec<Output>> {
        if let Some(bad) = w.iter().find(|i| !self.reference.alphabet().contains_input(**i)) {
            return Err(Error::InputDomain(bad.0));
        }
        Ok(self.reference.run(w))
    }
}
