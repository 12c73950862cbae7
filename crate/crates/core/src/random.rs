//! Seeded generators for property suites.
//!
//! All generators use ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), so a
//! seed fixes the machine on every platform.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, Input, Output};
use crate::error::{Error, Result};
use crate::interface::{InterfaceAutomaton, Label, Transition};
use crate::mealy::MealyMachine;
use crate::minimize::minimize;

const MAX_ATTEMPTS: usize = 1000;

/// Plain alphabet `a, b, c, …` / `x0, x1, …`.
pub fn plain_alphabet(n_inputs: usize, n_outputs: usize) -> Arc<Alphabet> {
    let inputs: Vec<String> = (0..n_inputs).map(input_name).collect();
    let outputs: Vec<String> = (0..n_outputs).map(|k| format!("x{k}")).collect();
    Arc::new(Alphabet::plain(inputs, outputs).expect("generated names are valid"))
}

fn input_name(k: usize) -> String {
    if k < 26 {
        ((b'a' + k as u8) as char).to_string()
    } else {
        format!("i{k}")
    }
}

/// A connected, minimal machine with exactly `n_states` states.
///
/// Generation: a random spanning tree over the states guarantees
/// reachability, the remaining edges and all outputs are uniform. The result
/// is minimized and the attempt repeated until no states merge.
pub fn random_minimal_mealy(n_states: usize, n_inputs: usize, n_outputs: usize, seed: u64) -> Result<MealyMachine> {
    assert!(n_states >= 1 && n_inputs >= 1 && n_outputs >= 2);
    let alphabet = plain_alphabet(n_inputs, n_outputs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let m = random_connected(&alphabet, n_states, n_outputs, &mut rng);
        let min = minimize(&m);
        if min.state_count() == n_states {
            return Ok(min);
        }
    }
    Err(Error::GeneratorExhausted {
        seed,
        attempts: MAX_ATTEMPTS,
    })
}

fn random_connected(alphabet: &Arc<Alphabet>, n_states: usize, n_outputs: usize, rng: &mut ChaCha8Rng) -> MealyMachine {
    let n_inputs = alphabet.input_count();
    let mut delta: Vec<Option<usize>> = vec![None; n_states * n_inputs];
    // tree edges: every state > 0 hangs off an earlier state via a free input
    for s in 1..n_states {
        loop {
            let parent = rng.gen_range(0..s);
            let i = rng.gen_range(0..n_inputs);
            let slot = &mut delta[parent * n_inputs + i];
            if slot.is_none() {
                *slot = Some(s);
                break;
            }
        }
    }
    for slot in delta.iter_mut() {
        if slot.is_none() {
            *slot = Some(rng.gen_range(0..n_states));
        }
    }
    let outs: Vec<Output> = (0..n_states * n_inputs)
        .map(|_| Output(rng.gen_range(0..n_outputs) as u16))
        .collect();
    MealyMachine::from_fn(alphabet.clone(), n_states, 0, |q, i| {
        let k = q * n_inputs + i.index();
        (delta[k].unwrap(), outs[k])
    })
}

/// The `k`-state combination lock over `{a, b}`: `a` advances one position,
/// `b` resets, and only `a` at the last position outputs `x1`. Distinguishing
/// positions 0 and 1 takes `a^(k-1)`, so its distinguisher bound is `k - 1`.
pub fn combination_lock(k: usize) -> MealyMachine {
    assert!(k >= 1);
    let alphabet = plain_alphabet(2, 2);
    MealyMachine::from_fn(alphabet, k, 0, |q, i| match i {
        Input(0) if q + 1 < k => (q + 1, Output(0)),
        Input(0) => (0, Output(1)),
        _ => (0, Output(0)),
    })
}

/// A random reachable interface automaton over `c0…`/`cb0…` with at most one
/// callback per state. Each callin is enabled with probability `p_in`; each
/// state has a callback with probability `p_out`.
pub fn random_interface_automaton(
    n_states: usize,
    n_callins: usize,
    n_callbacks: usize,
    seed: u64,
) -> InterfaceAutomaton {
    assert!(n_states >= 1 && n_callins >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_in = 0.6;
    let p_out = if n_callbacks == 0 { 0.0 } else { 0.4 };
    let mut edges = Vec::new();
    let mut has_in = vec![vec![false; n_callins]; n_states];
    let mut has_out = vec![false; n_states];
    for s in 1..n_states {
        // link each state from an earlier one so everything is reachable
        let parent = rng.gen_range(0..s);
        let use_callback = n_callbacks > 0 && !has_out[parent] && rng.gen_bool(0.3);
        if use_callback {
            has_out[parent] = true;
            edges.push(Transition {
                from: parent,
                label: Label::Callback(rng.gen_range(0..n_callbacks)),
                to: s,
            });
            continue;
        }
        let free: Vec<usize> = (0..n_callins).filter(|&c| !has_in[parent][c]).collect();
        if let Some(&c) = free.get(rng.gen_range(0..free.len().max(1)).min(free.len().saturating_sub(1))) {
            has_in[parent][c] = true;
            edges.push(Transition {
                from: parent,
                label: Label::Callin(c),
                to: s,
            });
        } else if !has_out[parent] && n_callbacks > 0 {
            has_out[parent] = true;
            edges.push(Transition {
                from: parent,
                label: Label::Callback(rng.gen_range(0..n_callbacks)),
                to: s,
            });
        } else {
            // parent saturated; hang off the previous state instead
            let prev = s - 1;
            let c = (0..n_callins).find(|&c| !has_in[prev][c]).unwrap_or(0);
            if !has_in[prev][c] {
                has_in[prev][c] = true;
                edges.push(Transition {
                    from: prev,
                    label: Label::Callin(c),
                    to: s,
                });
            }
        }
    }
    for s in 0..n_states {
        for (c, enabled) in has_in[s].iter_mut().enumerate() {
            if !*enabled && rng.gen_bool(p_in) {
                *enabled = true;
                edges.push(Transition {
                    from: s,
                    label: Label::Callin(c),
                    to: rng.gen_range(0..n_states),
                });
            }
        }
        if !has_out[s] && rng.gen_bool(p_out) {
            has_out[s] = true;
            edges.push(Transition {
                from: s,
                label: Label::Callback(rng.gen_range(0..n_callbacks)),
                to: rng.gen_range(0..n_states),
            });
        }
    }
    InterfaceAutomaton::from_parts(
        (0..n_callins).map(|k| format!("c{k}")).collect(),
        (0..n_callbacks).map(|k| format!("cb{k}")).collect(),
        (0..n_states).map(|k| format!("s{k}")).collect(),
        0,
        &edges,
    )
    .expect("generator respects determinism")
    .normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimize::distinguisher_bound;

    #[test]
    fn single_state_machine() {
        let m = random_minimal_mealy(1, 2, 2, 3).unwrap();
        assert_eq!(m.state_count(), 1);
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(
            random_minimal_mealy(5, 3, 3, 42).unwrap(),
            random_minimal_mealy(5, 3, 3, 42).unwrap()
        );
        assert_eq!(
            random_interface_automaton(6, 3, 2, 9),
            random_interface_automaton(6, 3, 2, 9)
        );
    }

    #[test]
    fn fifty_seeds_are_minimal() {
        for seed in 0..50 {
            let m = random_minimal_mealy(6, 3, 3, seed).unwrap();
            assert_eq!(m.state_count(), 6);
            assert_eq!(minimize(&m).state_count(), 6);
            assert!(distinguisher_bound(&m).is_ok());
            assert_eq!(m.reachable().len(), 6);
        }
    }

    #[test]
    fn random_automata_are_reachable_and_deterministic() {
        for seed in 0..50 {
            let a = random_interface_automaton(7, 3, 2, seed);
            assert_eq!(a.reachable().len(), a.state_count());
            for s in 0..a.state_count() {
                assert!(
                    a.transitions()
                        .iter()
                        .filter(|t| t.from == s && matches!(t.label, Label::Callback(_)))
                        .count()
                        <= 1
                );
            }
        }
    }
}
