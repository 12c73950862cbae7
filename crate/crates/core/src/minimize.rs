//! Partition refinement: minimization and the distinguisher bound.

use std::collections::{HashMap, VecDeque};

use crate::alphabet::{Input, Word};
use crate::error::{Error, Result};
use crate::mealy::MealyMachine;

/// Result of Moore-style refinement over `states`.
struct Refinement {
    class: Vec<usize>,
    classes: usize,
    /// Round in which the final split happened. Pairs split in round `r`
    /// need a word of length exactly `r`.
    last_split: usize,
}

fn refine(m: &MealyMachine, states: &[usize]) -> Refinement {
    let n = m.state_count();
    let mut class = vec![usize::MAX; n];
    for &q in states {
        class[q] = 0;
    }
    let mut classes = 1;
    let mut last_split = 0;
    let mut round = 0;
    loop {
        round += 1;
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = vec![usize::MAX; n];
        for &q in states {
            let mut sig = Vec::with_capacity(1 + 2 * m.alphabet().input_count());
            sig.push(class[q]);
            for i in m.alphabet().input_ids() {
                sig.push(m.output(q, i).index());
                sig.push(class[m.next(q, i)]);
            }
            let fresh = ids.len();
            next[q] = *ids.entry(sig).or_insert(fresh);
        }
        let count = ids.len();
        class = next;
        if count == classes {
            break;
        }
        classes = count;
        last_split = round;
    }
    Refinement {
        class,
        classes,
        last_split,
    }
}

/// Minimal trace-equivalent machine with only reachable states.
///
/// Quotient states are numbered in BFS order from the initial state and keep
/// the name of their first-visited member.
pub fn minimize(m: &MealyMachine) -> MealyMachine {
    let reachable = m.reachable();
    let r = refine(m, &reachable);
    let mut renumber: HashMap<usize, usize> = HashMap::new();
    let mut members: Vec<usize> = Vec::with_capacity(r.classes);
    for &q in &reachable {
        let c = r.class[q];
        renumber.entry(c).or_insert_with(|| {
            members.push(q);
            members.len() - 1
        });
    }
    let quotient = MealyMachine::from_fn(
        m.alphabet_arc().clone(),
        members.len(),
        renumber[&r.class[m.initial()]],
        |c, i| {
            let q = members[c];
            (renumber[&r.class[m.next(q, i)]], m.output(q, i))
        },
    );
    let names = members.iter().map(|&q| m.state_name(q).to_string()).collect();
    quotient.with_state_names(names)
}

/// Smallest `B` such that every pair of distinct states is separated by a
/// word of length at most `B`. Non-minimal machines are refused with an
/// equivalent pair.
pub fn distinguisher_bound(m: &MealyMachine) -> Result<usize> {
    let all: Vec<usize> = (0..m.state_count()).collect();
    let r = refine(m, &all);
    if r.classes < m.state_count() {
        let mut first_of: HashMap<usize, usize> = HashMap::new();
        for q in all {
            if let Some(&p) = first_of.get(&r.class[q]) {
                return Err(Error::NotMinimal(p, q));
            }
            first_of.insert(r.class[q], q);
        }
        unreachable!("fewer classes than states implies a shared class");
    }
    Ok(r.last_split)
}

/// BFS back-pointer: predecessor pair and the input taken.
type Step = ((usize, usize), Input);

/// Shortest (then lexicographically least) word separating states `p` and `q`.
pub fn separating_word(m: &MealyMachine, p: usize, q: usize) -> Option<Word> {
    let mut parent: HashMap<(usize, usize), Option<Step>> = HashMap::new();
    parent.insert((p, q), None);
    let mut queue = VecDeque::from([(p, q)]);
    while let Some(pair @ (a, b)) = queue.pop_front() {
        for i in m.alphabet().input_ids() {
            if m.output(a, i) != m.output(b, i) {
                let mut word = vec![i];
                let mut cur = pair;
                while let Some(Some((prev, j))) = parent.get(&cur) {
                    word.push(*j);
                    cur = *prev;
                }
                word.reverse();
                return Some(word);
            }
            let next = (m.next(a, i), m.next(b, i));
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((pair, i)));
                queue.push_back(next);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{Alphabet, Output};
    use crate::random::{combination_lock, random_minimal_mealy};
    use std::sync::Arc;

    fn one_state() -> MealyMachine {
        let a = Arc::new(Alphabet::plain(["a", "b"], ["x", "y"]).unwrap());
        MealyMachine::from_fn(a, 1, 0, |_, i| (0, Output(i.0)))
    }

    #[test]
    fn one_state_bound_is_zero() {
        assert_eq!(distinguisher_bound(&one_state()).unwrap(), 0);
    }

    #[test]
    fn cloned_state_is_merged() {
        let m = random_minimal_mealy(4, 2, 2, 7).unwrap();
        // extra state copies the a-successor of the initial state; the initial a-edge is redirected to it
        let n = m.state_count();
        let a = m.alphabet_arc().clone();
        let target = m.next(0, Input(0));
        let dup = MealyMachine::from_fn(a, n + 1, m.initial(), |q, i| {
            let src = if q == n { target } else { q };
            let mut t = m.next(src, i);
            if q == 0 && i == Input(0) {
                t = n;
            }
            (t, m.output(src, i))
        });
        assert_eq!(dup.traces_equal(&m).unwrap(), crate::mealy::Verdict::Correct);
        let min = minimize(&dup);
        assert_eq!(min.state_count(), n);
        assert!(matches!(distinguisher_bound(&dup), Err(Error::NotMinimal(_, _))));
    }

    #[test]
    fn already_minimal_keeps_size() {
        let m = random_minimal_mealy(5, 3, 2, 11).unwrap();
        assert_eq!(minimize(&m).state_count(), 5);
        assert_eq!(minimize(&m).traces_equal(&m).unwrap(), crate::mealy::Verdict::Correct);
    }

    #[test]
    fn combination_lock_is_tight() {
        for k in 1..=7 {
            let m = combination_lock(k);
            assert_eq!(distinguisher_bound(&m).unwrap(), k.saturating_sub(1), "k = {k}");
        }
    }

    #[test]
    fn bound_matches_pairwise_shortest_words() {
        for seed in 0..40 {
            let m = random_minimal_mealy(6, 3, 2, seed).unwrap();
            let b = distinguisher_bound(&m).unwrap();
            let mut worst = 0;
            for p in 0..m.state_count() {
                for q in p + 1..m.state_count() {
                    let w = separating_word(&m, p, q).expect("minimal machine");
                    worst = worst.max(w.len());
                }
            }
            assert_eq!(b, worst, "seed {seed}");
            assert!(b < m.state_count());
        }
    }
}
