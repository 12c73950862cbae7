//! From a learned closure machine back to an interface automaton.

use crate::error::{Error, Result};
use crate::interface::{InterfaceAutomaton, Label, Transition};
use crate::mealy::MealyMachine;

/// Erase the closure encoding: drop `err`/`oop` transitions and `wait`/`quiet`
/// self-loops, turn `wait` transitions into callback edges and callin
/// transitions (output `lambda`) into callin edges, then prune unreachable
/// states.
pub fn mealy_to_interface_automaton(m: &MealyMachine) -> Result<InterfaceAutomaton> {
    let a = m.alphabet();
    let (Some(wait), Some(quiet), Some(lambda)) = (a.wait(), a.quiet(), a.lambda()) else {
        return Err(Error::NotClosed);
    };
    m.check_err_sink()?;
    let callins: Vec<String> = a.callin_names().into_iter().map(String::from).collect();
    let callbacks: Vec<String> = a.callback_names().into_iter().map(String::from).collect();
    let mut edges = Vec::new();
    for (q, i, o, t) in m.transitions() {
        if a.is_absorbing(o) {
            continue;
        }
        let bad = |what: &str| {
            Error::MalformedClosure(format!(
                "{what}: {} --{}/{}--> {}",
                m.state_name(q),
                a.input_name(i),
                a.output_name(o),
                m.state_name(t)
            ))
        };
        if i == wait {
            if o == quiet {
                if t != q {
                    return Err(bad("quiet output changes state"));
                }
                continue;
            }
            if !a.is_callback(o) {
                return Err(bad("wait must answer a callback or quiet"));
            }
            edges.push(Transition {
                from: q,
                label: Label::Callback(o.index()),
                to: t,
            });
        } else {
            if o != lambda {
                return Err(bad("callin must answer lambda or err"));
            }
            edges.push(Transition {
                from: q,
                label: Label::Callin(i.index()),
                to: t,
            });
        }
    }
    let states = m.state_names().to_vec();
    let reachable = InterfaceAutomaton::from_parts(callins, callbacks, states, m.initial(), &edges)?.normalized();
    // Dense names after pruning the err sink and unreachable states.
    let names = (0..reachable.state_count()).map(|k| format!("q{k}")).collect();
    InterfaceAutomaton::from_parts(
        reachable.callins().to_vec(),
        reachable.callbacks().to_vec(),
        names,
        reachable.initial(),
        &reachable.transitions(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{Alphabet, Output};
    use crate::closure::closure;
    use crate::models;
    use crate::random::random_interface_automaton;
    use std::sync::Arc;

    #[test]
    fn all_err_machine_collapses() {
        let a = Arc::new(Alphabet::closed(["go"], ["done"]).unwrap());
        let err = a.err().unwrap();
        let m = MealyMachine::from_fn(a, 1, 0, |_, _| (0, err));
        let ia = mealy_to_interface_automaton(&m).unwrap();
        assert_eq!(ia.state_count(), 1);
        assert_eq!(ia.transition_count(), 0);
    }

    #[test]
    fn round_trip_benchmarks() {
        for a in models::all_deterministic() {
            let back = mealy_to_interface_automaton(&closure(&a).machine).unwrap();
            assert!(back.trace_equivalent(&a));
            assert!(back.is_isomorphic(&a));
        }
    }

    #[test]
    fn round_trip_random() {
        for seed in 0..100 {
            let a = random_interface_automaton(6, 3, 2, seed);
            let back = mealy_to_interface_automaton(&closure(&a).machine).unwrap();
            assert!(back.trace_equivalent(&a), "seed {seed}");
        }
    }

    #[test]
    fn rejects_err_sink_violation() {
        let a = Arc::new(Alphabet::closed(["go"], ["done"]).unwrap());
        let (err, lambda) = (a.err().unwrap(), a.lambda().unwrap());
        let m = MealyMachine::from_fn(a, 2, 0, |q, i| match (q, i.0) {
            (0, 0) => (1, err),
            (1, _) => (1, lambda),
            _ => (0, Output(0)),
        });
        assert!(matches!(
            mealy_to_interface_automaton(&m),
            Err(Error::ErrSinkViolation(1))
        ));
    }
}
