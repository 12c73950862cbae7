use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AsyncInterface, Invocation};
use crate::error::{Error, Result};
use crate::interface::{InterfaceAutomaton, Label, Transition};

/// Discrete timing: a `wait` observes `t_max` ticks, callbacks fire between
/// `t_min` and `t_max - 1` ticks after becoming pending, inputs take no time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Timing {
    pub t_min: u64,
    pub t_max: u64,
    /// Delay per callback name; unlisted callbacks use `t_min`.
    pub delays: Vec<(String, u64)>,
}

impl Default for Timing {
    fn default() -> Self {
        Timing {
            t_min: 1,
            t_max: 10,
            delays: Vec::new(),
        }
    }
}

impl Timing {
    pub fn validate(&self) -> Result<()> {
        if self.t_min == 0 || self.t_min >= self.t_max {
            return Err(Error::Model(format!(
                "timing needs 0 < t_min < t_max, got t_min={} t_max={}",
                self.t_min, self.t_max
            )));
        }
        for (cb, d) in &self.delays {
            if *d < self.t_min || *d >= self.t_max {
                return Err(Error::Model(format!(
                    "delay of {cb} must lie in [t_min, t_max), got {d}"
                )));
            }
        }
        Ok(())
    }

    pub fn delay(&self, callback: &str) -> u64 {
        self.delays
            .iter()
            .find(|(cb, _)| cb == callback)
            .map_or(self.t_min, |(_, d)| *d)
    }
}

/// Alternative transitions out of one state; the simulator picks one at
/// random each time it needs to resolve them. Test fixtures only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondetBlock {
    pub from: usize,
    pub choices: Vec<(Label, usize)>,
}

/// A simulated component: the deterministic transitions, optional
/// non-deterministic alternatives, and timing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsyncModel {
    automaton: InterfaceAutomaton,
    nondet: Vec<NondetBlock>,
    timing: Timing,
}

impl AsyncModel {
    pub fn new(automaton: InterfaceAutomaton, nondet: Vec<NondetBlock>, timing: Timing) -> Result<Self> {
        timing.validate()?;
        for (cb, _) in &timing.delays {
            if automaton.callback_index(cb).is_none() {
                return Err(Error::UnknownSymbol(cb.clone()));
            }
        }
        let mut seen = vec![false; automaton.state_count()];
        for b in &nondet {
            let name = automaton.state_name(b.from).to_string();
            if std::mem::replace(&mut seen[b.from], true) {
                return Err(Error::Model(format!("two nondet blocks for state {name}")));
            }
            if b.choices.len() < 2 {
                return Err(Error::Model(format!("nondet block of {name} needs two choices")));
            }
            for &(label, _) in &b.choices {
                let clash = match label {
                    Label::Callin(c) => automaton.on_callin(b.from, c).is_some(),
                    Label::Callback(_) => automaton.pending(b.from).is_some(),
                };
                if clash {
                    return Err(Error::Model(format!(
                        "nondet choice on {} in {name} overlaps a deterministic transition",
                        automaton.label_name(label)
                    )));
                }
            }
        }
        Ok(AsyncModel {
            automaton,
            nondet,
            timing,
        })
    }

    pub fn deterministic(automaton: InterfaceAutomaton) -> Self {
        AsyncModel {
            automaton,
            nondet: Vec::new(),
            timing: Timing::default(),
        }
    }

    pub fn automaton(&self) -> &InterfaceAutomaton {
        &self.automaton
    }

    pub fn nondet(&self) -> &[NondetBlock] {
        &self.nondet
    }

    pub fn timing(&self) -> &Timing {
        &self.timing
    }

    pub fn is_deterministic(&self) -> bool {
        self.nondet.is_empty()
    }

    /// Named deterministic transitions `(from, symbol, to)`.
    pub fn named_transitions(&self) -> Vec<(String, String, String)> {
        self.automaton
            .transitions()
            .into_iter()
            .map(|t: Transition| {
                (
                    self.automaton.state_name(t.from).to_string(),
                    self.automaton.label_name(t.label).to_string(),
                    self.automaton.state_name(t.to).to_string(),
                )
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
struct Pending {
    callback: usize,
    to: usize,
    due: u64,
}

/// Deterministic discrete-time simulator. Non-deterministic choices are
/// drawn from a ChaCha8 stream seeded once; `reset` does not reseed, so
/// repeated runs of a nondet fixture can disagree.
pub struct Simulator {
    model: AsyncModel,
    by_state: HashMap<usize, usize>,
    delays: Vec<u64>,
    rng: ChaCha8Rng,
    state: usize,
    clock: u64,
    pending: Option<Pending>,
}

impl Simulator {
    pub fn new(model: AsyncModel, seed: u64) -> Self {
        let by_state = model.nondet.iter().enumerate().map(|(k, b)| (b.from, k)).collect();
        let delays = model
            .automaton
            .callbacks()
            .iter()
            .map(|cb| model.timing.delay(cb))
            .collect();
        let mut sim = Simulator {
            state: model.automaton.initial(),
            model,
            by_state,
            delays,
            rng: ChaCha8Rng::seed_from_u64(seed),
            clock: 0,
            pending: None,
        };
        sim.reset();
        sim
    }

    pub fn deterministic(automaton: InterfaceAutomaton) -> Self {
        Self::new(AsyncModel::deterministic(automaton), 0)
    }

    pub fn model(&self) -> &AsyncModel {
        &self.model
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    fn choose(&mut self, options: &[usize]) -> usize {
        options[self.rng.gen_range(0..options.len())]
    }

    fn enter(&mut self, s: usize) {
        self.state = s;
        let a = &self.model.automaton;
        let chosen = match self.by_state.get(&s) {
            Some(&k) => {
                let block = &self.model.nondet[k];
                let callbacks: Vec<usize> = (0..block.choices.len())
                    .filter(|&j| matches!(block.choices[j].0, Label::Callback(_)))
                    .collect();
                if callbacks.is_empty() {
                    a.pending(s)
                } else {
                    let j = self.choose(&callbacks);
                    match self.model.nondet[k].choices[j] {
                        (Label::Callback(cb), to) => Some((cb, to)),
                        _ => unreachable!(),
                    }
                }
            }
            None => a.pending(s),
        };
        self.pending = chosen.map(|(callback, to)| Pending {
            callback,
            to,
            due: self.clock + self.delays[callback],
        });
    }
}

impl AsyncInterface for Simulator {
    fn callins(&self) -> &[String] {
        self.model.automaton.callins()
    }

    fn callbacks(&self) -> &[String] {
        self.model.automaton.callbacks()
    }

    fn reset(&mut self) {
        self.clock = 0;
        self.enter(self.model.automaton.initial());
    }

    fn invoke(&mut self, callin: usize) -> Invocation {
        let s = self.state;
        let target = match self.by_state.get(&s) {
            Some(&k) => {
                let options: Vec<usize> = self.model.nondet[k]
                    .choices
                    .iter()
                    .filter(|(l, _)| *l == Label::Callin(callin))
                    .map(|&(_, to)| to)
                    .collect();
                if options.is_empty() {
                    self.model.automaton.on_callin(s, callin)
                } else {
                    Some(self.choose(&options))
                }
            }
            None => self.model.automaton.on_callin(s, callin),
        };
        match target {
            Some(t) => {
                self.enter(t);
                Invocation::Accepted
            }
            None => Invocation::Rejected,
        }
    }

    fn wait(&mut self) -> Option<usize> {
        let window_end = self.clock + self.model.timing.t_max;
        match self.pending {
            Some(p) if p.due <= window_end => {
                self.clock = p.due.max(self.clock);
                self.enter(p.to);
                Some(p.callback)
            }
            _ => {
                self.clock = window_end;
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn timing_validation() {
        let bad = Timing {
            t_min: 5,
            t_max: 5,
            delays: vec![],
        };
        assert!(bad.validate().is_err());
        let bad_delay = Timing {
            t_min: 2,
            t_max: 6,
            delays: vec![("x".into(), 6)],
        };
        assert!(bad_delay.validate().is_err());
    }

    #[test]
    fn callback_arrives_after_delay() {
        let a = models::async_task();
        let timing = Timing {
            t_min: 3,
            t_max: 20,
            delays: vec![("onPostExecute".into(), 7)],
        };
        let mut sim = Simulator::new(AsyncModel::new(a.clone(), vec![], timing).unwrap(), 1);
        let execute = a.callin_index("execute").unwrap();
        assert_eq!(sim.invoke(execute), Invocation::Accepted);
        assert_eq!(sim.clock(), 0);
        assert_eq!(sim.wait(), a.callback_index("onPostExecute"));
        assert_eq!(sim.clock(), 7);
        assert_eq!(sim.wait(), None);
        assert_eq!(sim.clock(), 27);
        assert_eq!(sim.invoke(execute), Invocation::Rejected);
    }
}
