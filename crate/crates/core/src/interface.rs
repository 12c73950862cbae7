//! Interface automata: finite automata whose edges carry either a callin
//! (input) or a callback (output), with callbacks occurring asynchronously.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::alphabet::{is_reserved, Symbol, SymbolKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Callin(usize),
    Callback(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    pub label: Label,
    pub to: usize,
}

/// A deterministic interface automaton in which every state has at most one
/// outgoing callback edge (one pending callback at a time).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfaceAutomaton {
    callins: Vec<String>,
    callbacks: Vec<String>,
    states: Vec<String>,
    initial: usize,
    /// `[state][callin]` successor.
    on_callin: Vec<Vec<Option<usize>>>,
    /// The single pending callback of a state and its successor.
    pending: Vec<Option<(usize, usize)>>,
}

impl InterfaceAutomaton {
    /// Build from named transitions `(from, symbol, to)`. Fails on unknown
    /// names, reserved symbol names, duplicate edges, or a state with two
    /// callback edges.
    pub fn new<S: AsRef<str>>(
        callins: &[S],
        callbacks: &[S],
        states: &[S],
        initial: &str,
        transitions: &[(S, S, S)],
    ) -> Result<Self> {
        let callins: Vec<String> = validated(callins, SymbolKind::Input)?;
        let callbacks: Vec<String> = validated(callbacks, SymbolKind::Output)?;
        if let Some(dup) = callins.iter().find(|c| callbacks.contains(c)) {
            return Err(Error::DuplicateSymbol(dup.clone()));
        }
        let states: Vec<String> = states.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (k, s) in states.iter().enumerate() {
            if index.insert(s.as_str(), k).is_some() {
                return Err(Error::DuplicateState(s.clone()));
            }
        }
        let state = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownState(name.to_string()))
        };
        let initial = state(initial)?;
        let mut edges = Vec::with_capacity(transitions.len());
        for (from, sym, to) in transitions {
            let (from, sym, to) = (from.as_ref(), sym.as_ref(), to.as_ref());
            let label = if let Some(c) = callins.iter().position(|c| c == sym) {
                Label::Callin(c)
            } else if let Some(c) = callbacks.iter().position(|c| c == sym) {
                Label::Callback(c)
            } else {
                return Err(Error::UnknownSymbol(sym.to_string()));
            };
            edges.push(Transition {
                from: state(from)?,
                label,
                to: state(to)?,
            });
        }
        Self::from_parts(callins, callbacks, states, initial, &edges)
    }

    pub(crate) fn from_parts(
        callins: Vec<String>,
        callbacks: Vec<String>,
        states: Vec<String>,
        initial: usize,
        edges: &[Transition],
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 || initial >= n {
            return Err(Error::Model("interface automaton needs an initial state".into()));
        }
        let mut on_callin = vec![vec![None; callins.len()]; n];
        let mut pending: Vec<Option<(usize, usize)>> = vec![None; n];
        for t in edges {
            match t.label {
                Label::Callin(c) => {
                    if on_callin[t.from][c].is_some() {
                        return Err(Error::DuplicateTransition {
                            state: states[t.from].clone(),
                            symbol: callins[c].clone(),
                        });
                    }
                    on_callin[t.from][c] = Some(t.to);
                }
                Label::Callback(c) => {
                    if let Some((other, _)) = pending[t.from] {
                        if other == c {
                            return Err(Error::DuplicateTransition {
                                state: states[t.from].clone(),
                                symbol: callbacks[c].clone(),
                            });
                        }
                        return Err(Error::OutputNondeterminism {
                            state: states[t.from].clone(),
                            first: callbacks[other].clone(),
                            second: callbacks[c].clone(),
                        });
                    }
                    pending[t.from] = Some((c, t.to));
                }
            }
        }
        Ok(InterfaceAutomaton {
            callins,
            callbacks,
            states,
            initial,
            on_callin,
            pending,
        })
    }

    pub fn callins(&self) -> &[String] {
        &self.callins
    }

    pub fn callbacks(&self) -> &[String] {
        &self.callbacks
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn callin_index(&self, name: &str) -> Option<usize> {
        self.callins.iter().position(|c| c == name)
    }

    pub fn callback_index(&self, name: &str) -> Option<usize> {
        self.callbacks.iter().position(|c| c == name)
    }

    /// Successor of `s` on callin `c`, if enabled.
    pub fn on_callin(&self, s: usize, c: usize) -> Option<usize> {
        self.on_callin[s][c]
    }

    /// The callback pending in `s` and the state it leads to.
    pub fn pending(&self, s: usize) -> Option<(usize, usize)> {
        self.pending[s]
    }

    pub fn label_name(&self, l: Label) -> &str {
        match l {
            Label::Callin(c) => &self.callins[c],
            Label::Callback(c) => &self.callbacks[c],
        }
    }

    /// Step on a symbol name; `None` if the symbol is not enabled.
    pub fn step(&self, s: usize, symbol: &str) -> Option<usize> {
        if let Some(c) = self.callin_index(symbol) {
            return self.on_callin[s][c];
        }
        let c = self.callback_index(symbol)?;
        match self.pending[s] {
            Some((p, t)) if p == c => Some(t),
            _ => None,
        }
    }

    /// All transitions ordered by source, then callins before callbacks in
    /// declaration order.
    pub fn transitions(&self) -> Vec<Transition> {
        let mut out = Vec::new();
        for s in 0..self.state_count() {
            for (c, t) in self.on_callin[s].iter().enumerate() {
                if let Some(t) = t {
                    out.push(Transition {
                        from: s,
                        label: Label::Callin(c),
                        to: *t,
                    });
                }
            }
            if let Some((c, t)) = self.pending[s] {
                out.push(Transition {
                    from: s,
                    label: Label::Callback(c),
                    to: t,
                });
            }
        }
        out
    }

    pub fn transition_count(&self) -> usize {
        self.transitions().len()
    }

    /// Successor list of `s` in transition order.
    fn successors(&self, s: usize) -> impl Iterator<Item = (Label, usize)> + '_ {
        let ins = self.on_callin[s]
            .iter()
            .enumerate()
            .filter_map(|(c, t)| t.map(|t| (Label::Callin(c), t)));
        ins.chain(self.pending[s].map(|(c, t)| (Label::Callback(c), t)))
    }

    /// States reachable from the initial state, BFS order.
    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut head = 0;
        while head < order.len() {
            let s = order[head];
            head += 1;
            for (_, t) in self.successors(s) {
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
        }
        order
    }

    /// Drop unreachable states. Surviving states keep their relative order.
    pub fn normalized(&self) -> Self {
        let mut keep: Vec<usize> = self.reachable();
        keep.sort_unstable();
        let mut renumber = vec![usize::MAX; self.state_count()];
        for (k, &s) in keep.iter().enumerate() {
            renumber[s] = k;
        }
        let edges: Vec<Transition> = self
            .transitions()
            .into_iter()
            .filter(|t| renumber[t.from] != usize::MAX)
            .map(|t| Transition {
                from: renumber[t.from],
                label: t.label,
                to: renumber[t.to],
            })
            .collect();
        Self::from_parts(
            self.callins.clone(),
            self.callbacks.clone(),
            keep.iter().map(|&s| self.states[s].clone()).collect(),
            renumber[self.initial],
            &edges,
        )
        .expect("sub-automaton of a valid automaton is valid")
    }

    /// Label correspondence by symbol name; `None` if a name is missing.
    fn symbol_map(&self, other: &Self) -> Option<HashMap<Label, Label>> {
        let mut map = HashMap::new();
        for (c, name) in self.callins.iter().enumerate() {
            map.insert(Label::Callin(c), Label::Callin(other.callin_index(name)?));
        }
        for (c, name) in self.callbacks.iter().enumerate() {
            map.insert(Label::Callback(c), Label::Callback(other.callback_index(name)?));
        }
        Some(map)
    }

    fn same_vocabulary(&self, other: &Self) -> bool {
        let a: HashSet<&String> = self.callins.iter().chain(&self.callbacks).collect();
        let b: HashSet<&String> = other.callins.iter().chain(&other.callbacks).collect();
        a == b
    }

    /// A shortest trace (by symbol names) accepted by exactly one of the two
    /// automata, or `None` if their trace sets coincide.
    pub fn trace_difference(&self, other: &Self) -> Option<Vec<String>> {
        let mut symbols: Vec<&str> = self.callins.iter().map(String::as_str).collect();
        symbols.extend(self.callbacks.iter().map(String::as_str));
        for s in other.callins.iter().chain(&other.callbacks) {
            if !symbols.contains(&s.as_str()) {
                symbols.push(s);
            }
        }
        type Pair = (Option<usize>, Option<usize>);
        let start: Pair = (Some(self.initial), Some(other.initial));
        let mut parent: HashMap<Pair, Option<(Pair, usize)>> = HashMap::new();
        parent.insert(start, None);
        let mut queue = VecDeque::from([start]);
        while let Some(pair) = queue.pop_front() {
            for (k, sym) in symbols.iter().enumerate() {
                let a = pair.0.and_then(|s| self.step(s, sym));
                let b = pair.1.and_then(|s| other.step(s, sym));
                if a.is_some() != b.is_some() {
                    let mut trace = vec![sym.to_string()];
                    let mut cur = pair;
                    while let Some(Some((prev, j))) = parent.get(&cur) {
                        trace.push(symbols[*j].to_string());
                        cur = *prev;
                    }
                    trace.reverse();
                    return Some(trace);
                }
                if a.is_none() {
                    continue;
                }
                let next = (a, b);
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some((pair, k)));
                    queue.push_back(next);
                }
            }
        }
        None
    }

    pub fn trace_equivalent(&self, other: &Self) -> bool {
        self.trace_difference(other).is_none()
    }

    /// Isomorphism of the reachable parts, matching symbols by name.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        if !self.same_vocabulary(other) {
            return false;
        }
        let a = self.normalized();
        let b = other.normalized();
        if a.state_count() != b.state_count() || a.transition_count() != b.transition_count() {
            return false;
        }
        let Some(map) = a.symbol_map(&b) else {
            return false;
        };
        let mut fwd = vec![usize::MAX; a.state_count()];
        let mut bwd = vec![usize::MAX; b.state_count()];
        fwd[a.initial] = b.initial;
        bwd[b.initial] = a.initial;
        let mut queue = VecDeque::from([a.initial]);
        while let Some(s) = queue.pop_front() {
            let t = fwd[s];
            for (label, s2) in a.successors(s) {
                let other_label = map[&label];
                let t2 = match other_label {
                    Label::Callin(c) => b.on_callin[t][c],
                    Label::Callback(c) => match b.pending[t] {
                        Some((p, to)) if p == c => Some(to),
                        _ => None,
                    },
                };
                let Some(t2) = t2 else { return false };
                match (fwd[s2], bwd[t2]) {
                    (usize::MAX, usize::MAX) => {
                        fwd[s2] = t2;
                        bwd[t2] = s2;
                        queue.push_back(s2);
                    }
                    (x, y) if x == t2 && y == s2 => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

fn validated<S: AsRef<str>>(names: &[S], kind: SymbolKind) -> Result<Vec<String>> {
    let mut seen = HashSet::new();
    names
        .iter()
        .map(|n| {
            let n = n.as_ref();
            if is_reserved(n) {
                return Err(Error::ReservedSymbol(n.to_string()));
            }
            Symbol::user(n, kind)?;
            if !seen.insert(n) {
                return Err(Error::DuplicateSymbol(n.to_string()));
            }
            Ok(n.to_string())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn async_task() -> InterfaceAutomaton {
        InterfaceAutomaton::new(
            &["execute", "cancel"],
            &["onCancelled", "onPostExecute"],
            &["Start", "Running", "Cancelling", "Cancelling2", "Completed"],
            "Start",
            &[
                ("Start", "execute", "Running"),
                ("Start", "cancel", "Cancelling"),
                ("Running", "cancel", "Cancelling2"),
                ("Running", "onPostExecute", "Completed"),
                ("Cancelling", "execute", "Cancelling2"),
                ("Cancelling", "cancel", "Cancelling"),
                ("Cancelling", "onCancelled", "Completed"),
                ("Cancelling2", "cancel", "Cancelling2"),
                ("Cancelling2", "onCancelled", "Completed"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_callbacks_in_one_state_rejected() {
        let r = InterfaceAutomaton::new(
            &["go"],
            &["a", "b"],
            &["S", "T"],
            "S",
            &[("S", "a", "T"), ("S", "b", "T")],
        );
        assert!(matches!(r, Err(Error::OutputNondeterminism { ref state, .. }) if state == "S"));
    }

    #[test]
    fn reserved_names_rejected() {
        let r = InterfaceAutomaton::new(&["wait"], &["a"], &["S"], "S", &[]);
        assert!(matches!(r, Err(Error::ReservedSymbol(_))));
    }

    #[test]
    fn isomorphism_ignores_state_names_and_order() {
        let a = async_task();
        let b = InterfaceAutomaton::new(
            &["cancel", "execute"],
            &["onPostExecute", "onCancelled"],
            &["e", "d", "c", "b", "a"],
            "a",
            &[
                ("a", "execute", "b"),
                ("a", "cancel", "c"),
                ("b", "cancel", "d"),
                ("b", "onPostExecute", "e"),
                ("c", "execute", "d"),
                ("c", "cancel", "c"),
                ("c", "onCancelled", "e"),
                ("d", "cancel", "d"),
                ("d", "onCancelled", "e"),
            ],
        )
        .unwrap();
        assert!(a.is_isomorphic(&b));
        assert!(a.trace_equivalent(&b));
    }

    #[test]
    fn trace_difference_is_shortest() {
        let a = async_task();
        let mut edges: Vec<Transition> = a.transitions();
        // drop Cancelling2 --cancel--> Cancelling2
        edges.retain(|t| !(t.from == 3 && t.label == Label::Callin(1)));
        let b = InterfaceAutomaton::from_parts(a.callins.clone(), a.callbacks.clone(), a.states.clone(), 0, &edges)
            .unwrap();
        let diff = a.trace_difference(&b).unwrap();
        assert_eq!(diff, ["execute", "cancel", "cancel"]);
        assert!(!a.is_isomorphic(&b));
    }

    #[test]
    fn normalization_prunes_unreachable() {
        let a = InterfaceAutomaton::new(
            &["go"],
            &["done"],
            &["S", "Orphan", "T"],
            "S",
            &[("S", "go", "T"), ("Orphan", "go", "S")],
        )
        .unwrap();
        let n = a.normalized();
        assert_eq!(n.state_names(), ["S", "T"]);
        assert!(n.trace_equivalent(&a));
    }
}
