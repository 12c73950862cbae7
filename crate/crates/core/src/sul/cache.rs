use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Input, Output};
use crate::error::{Error, Result};
use crate::oracle::{MembershipOracle, QueryCounters};

/// Two observations that agree on their inputs but not on their outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonDeterminismReport {
    /// Inputs up to and including the first disagreeing position.
    pub prefix: Vec<String>,
    /// Outputs on `prefix` as first observed.
    pub first: Vec<String>,
    /// Outputs on `prefix` as observed now.
    pub second: Vec<String>,
    /// The query that produced `first`.
    pub first_query: Vec<String>,
    /// The query that produced `second`.
    pub second_query: Vec<String>,
}

impl NonDeterminismReport {
    fn trace(inputs: &[String], outputs: &[String]) -> String {
        inputs
            .iter()
            .zip(outputs)
            .map(|(i, o)| format!("{i}/{o}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for NonDeterminismReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  seen:  {}", Self::trace(&self.prefix, &self.first))?;
        writeln!(f, "  now:   {}", Self::trace(&self.prefix, &self.second))?;
        writeln!(f, "  first query:  {}", self.first_query.join(" "))?;
        write!(f, "  second query: {}", self.second_query.join(" "))
    }
}

#[derive(Clone, Debug)]
struct Node {
    children: HashMap<Input, usize>,
    /// Output of the last input on the path to this node.
    output: Option<Output>,
    /// Index into `queries` of the execution that created this node.
    origin: usize,
}

/// Prefix-tree cache in front of a membership oracle.
///
/// A word is answered from the cache when it is a prefix of an executed
/// word, or extends one past an absorbing output (`err`/`oop`). Every
/// execution is checked against what is already cached; a contradiction
/// aborts with [`Error::NonDeterminism`].
pub struct QueryCache<O> {
    inner: O,
    nodes: Vec<Node>,
    queries: Vec<Vec<Input>>,
    counters: QueryCounters,
}

impl<O: MembershipOracle> QueryCache<O> {
    pub fn new(inner: O) -> Self {
        QueryCache {
            inner,
            nodes: vec![Node {
                children: HashMap::new(),
                output: None,
                origin: 0,
            }],
            queries: Vec::new(),
            counters: QueryCounters::default(),
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut O {
        &mut self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    /// Number of distinct executions so far.
    pub fn executed_words(&self) -> &[Vec<Input>] {
        &self.queries
    }

    pub fn lookup(&self, w: &[Input]) -> Option<Vec<Output>> {
        let alphabet = self.inner.alphabet();
        let mut node = 0;
        let mut out = Vec::with_capacity(w.len());
        for (k, i) in w.iter().enumerate() {
            match self.nodes[node].children.get(i) {
                Some(&child) => {
                    node = child;
                    out.push(self.nodes[child].output.unwrap());
                }
                None => {
                    let last = out.last().copied()?;
                    if !alphabet.is_absorbing(last) {
                        return None;
                    }
                    out.resize(w.len(), last);
                    debug_assert_eq!(out.len(), w.len(), "padding from position {k}");
                    return Some(out);
                }
            }
        }
        Some(out)
    }

    /// Compare an observation with the cache without storing it.
    pub fn detect_nondeterminism(&self, w: &[Input], outputs: &[Output]) -> Option<NonDeterminismReport> {
        let alphabet = self.inner.alphabet();
        let mut node = 0;
        let mut seen: Vec<Output> = Vec::with_capacity(w.len());
        let mut origin = None;
        for (k, (i, &o)) in w.iter().zip(outputs).enumerate() {
            let expected = match self.nodes[node].children.get(i) {
                Some(&child) => {
                    node = child;
                    origin = Some(self.nodes[child].origin);
                    self.nodes[child].output.unwrap()
                }
                None => match seen.last() {
                    Some(&last) if alphabet.is_absorbing(last) => last,
                    _ => return None,
                },
            };
            seen.push(expected);
            if expected != o {
                let prefix = &w[..=k];
                let first_query = origin.map_or_else(Vec::new, |q| self.queries[q].clone());
                return Some(NonDeterminismReport {
                    prefix: alphabet.input_names(prefix),
                    first: alphabet.output_names(&seen),
                    second: alphabet.output_names(&outputs[..=k]),
                    first_query: alphabet.input_names(&first_query),
                    second_query: alphabet.input_names(w),
                });
            }
        }
        None
    }

    fn insert(&mut self, w: &[Input], outputs: &[Output]) {
        let id = self.queries.len();
        self.queries.push(w.to_vec());
        let mut node = 0;
        for (&i, &o) in w.iter().zip(outputs) {
            node = match self.nodes[node].children.get(&i) {
                Some(&child) => child,
                None => {
                    let child = self.nodes.len();
                    self.nodes.push(Node {
                        children: HashMap::new(),
                        output: Some(o),
                        origin: id,
                    });
                    self.nodes[node].children.insert(i, child);
                    child
                }
            };
        }
    }
}

impl<O: MembershipOracle> MembershipOracle for QueryCache<O> {
    fn alphabet(&self) -> &Arc<Alphabet> {
        self.inner.alphabet()
    }

    fn query(&mut self, w: &[Input]) -> Result<Vec<Output>> {
        self.counters.asked += 1;
        if let Some(out) = self.lookup(w) {
            return Ok(out);
        }
        self.counters.executed += 1;
        let out = self.inner.query(w)?;
        if let Some(report) = self.detect_nondeterminism(w, &out) {
            return Err(Error::NonDeterminism(Box::new(report)));
        }
        self.insert(w, &out);
        Ok(out)
    }

    fn is_cached(&self, w: &[Input]) -> bool {
        self.lookup(w).is_some()
    }

    fn counters(&self) -> QueryCounters {
        self.counters
    }
}
