use std::collections::{HashMap, HashSet};

use super::{AsyncModel, NondetBlock, Timing};
use crate::error::{Error, Result};
use crate::interface::{InterfaceAutomaton, Label, Transition};

/// Alphabet refinement: split callins into variants, merge callbacks.
///
/// Variant `j` of a split callin takes the `j`-th non-deterministic choice
/// on that callin wherever there is one, and the ordinary transition
/// elsewhere.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefinementSpec {
    pub split: Vec<(String, Vec<String>)>,
    pub merge: Vec<(String, Vec<String>)>,
}

impl RefinementSpec {
    pub fn is_empty(&self) -> bool {
        self.split.is_empty() && self.merge.is_empty()
    }
}

pub fn apply_refinement(model: &AsyncModel, r: &RefinementSpec) -> Result<AsyncModel> {
    if r.is_empty() {
        return Ok(model.clone());
    }
    let a = model.automaton();
    let fail = |msg: String| Err(Error::Refinement(msg));

    // callins: each split symbol is replaced in place by its variants
    let mut splits: HashMap<usize, &[String]> = HashMap::new();
    for (src, variants) in &r.split {
        let Some(c) = a.callin_index(src) else {
            return fail(format!("unknown callin {src}"));
        };
        if variants.is_empty() || splits.insert(c, variants).is_some() {
            return fail(format!("callin {src} split twice or into nothing"));
        }
    }
    let mut callins: Vec<String> = Vec::new();
    let mut callin_variants: Vec<Vec<usize>> = Vec::new();
    for (c, name) in a.callins().iter().enumerate() {
        let names: Vec<String> = match splits.get(&c) {
            Some(vs) => vs.to_vec(),
            None => vec![name.clone()],
        };
        let mut ids = Vec::new();
        for n in names {
            ids.push(callins.len());
            callins.push(n);
        }
        callin_variants.push(ids);
    }

    // callbacks: each merge class collapses onto the position of its first member
    let mut merged_into: HashMap<usize, String> = HashMap::new();
    for (into, members) in &r.merge {
        if members.is_empty() {
            return fail(format!("merge into {into} has no members"));
        }
        for m in members {
            let Some(cb) = a.callback_index(m) else {
                return fail(format!("unknown callback {m}"));
            };
            if merged_into.insert(cb, into.clone()).is_some() {
                return fail(format!("callback {m} is in two merge classes"));
            }
        }
    }
    let mut callbacks: Vec<String> = Vec::new();
    let mut callback_map: Vec<usize> = Vec::new();
    for (cb, name) in a.callbacks().iter().enumerate() {
        let target = merged_into.get(&cb).unwrap_or(name);
        match callbacks.iter().position(|n| n == target) {
            Some(k) if merged_into.contains_key(&cb) => callback_map.push(k),
            Some(_) => return fail(format!("merged symbol {target} clashes with an existing callback")),
            None => {
                callback_map.push(callbacks.len());
                callbacks.push(target.clone());
            }
        }
    }
    if let Some(dup) = callins.iter().find(|c| callbacks.contains(c)) {
        return fail(format!("symbol {dup} is both a callin and a callback"));
    }
    if callins.iter().collect::<HashSet<_>>().len() != callins.len() {
        return fail("split variants clash with existing callins".into());
    }

    let mut edges: Vec<Transition> = Vec::new();
    for t in a.transitions() {
        match t.label {
            Label::Callin(c) => edges.extend(callin_variants[c].iter().map(|&v| Transition {
                label: Label::Callin(v),
                ..t
            })),
            Label::Callback(cb) => edges.push(Transition {
                label: Label::Callback(callback_map[cb]),
                ..t
            }),
        }
    }
    let mut nondet = Vec::new();
    for block in model.nondet() {
        let state = a.state_name(block.from);
        let mut rest: Vec<(Label, usize)> = Vec::new();
        let mut by_callin: Vec<(usize, Vec<usize>)> = Vec::new();
        for &(label, to) in &block.choices {
            match label {
                Label::Callin(c) if splits.contains_key(&c) => match by_callin.iter_mut().find(|(k, _)| *k == c) {
                    Some((_, tos)) => tos.push(to),
                    None => by_callin.push((c, vec![to])),
                },
                Label::Callin(c) => rest.push((Label::Callin(callin_variants[c][0]), to)),
                Label::Callback(cb) => {
                    let l = Label::Callback(callback_map[cb]);
                    if !rest.contains(&(l, to)) {
                        rest.push((l, to));
                    }
                }
            }
        }
        for (c, tos) in by_callin {
            let variants = &callin_variants[c];
            if variants.len() != tos.len() {
                return fail(format!(
                    "{} has {} outcomes in {state} but {} variants",
                    a.callins()[c],
                    tos.len(),
                    variants.len()
                ));
            }
            for (&v, &to) in variants.iter().zip(&tos) {
                edges.push(Transition {
                    from: block.from,
                    label: Label::Callin(v),
                    to,
                });
            }
        }
        // whatever is still ambiguous stays a nondet block
        let mut by_label: Vec<(Label, Vec<usize>)> = Vec::new();
        let callbacks_left = rest.iter().filter(|(l, _)| matches!(l, Label::Callback(_))).count();
        for (label, to) in rest {
            if callbacks_left == 1 && matches!(label, Label::Callback(_)) {
                edges.push(Transition {
                    from: block.from,
                    label,
                    to,
                });
                continue;
            }
            match by_label.iter_mut().find(|(l, _)| *l == label) {
                Some((_, tos)) => tos.push(to),
                None => by_label.push((label, vec![to])),
            }
        }
        let mut choices = Vec::new();
        for (label, tos) in by_label {
            if tos.len() == 1 && matches!(label, Label::Callin(_)) {
                edges.push(Transition {
                    from: block.from,
                    label,
                    to: tos[0],
                });
            } else {
                choices.extend(tos.into_iter().map(|to| (label, to)));
            }
        }
        if !choices.is_empty() {
            nondet.push(NondetBlock {
                from: block.from,
                choices,
            });
        }
    }

    let automaton = InterfaceAutomaton::from_parts(
        callins,
        callbacks.clone(),
        a.state_names().to_vec(),
        a.initial(),
        &edges,
    )?;
    let mut delays: Vec<(String, u64)> = Vec::new();
    for (name, d) in &model.timing().delays {
        let cb = a.callback_index(name).expect("validated delay");
        let target = &callbacks[callback_map[cb]];
        if !delays.iter().any(|(n, _)| n == target) {
            delays.push((target.clone(), *d));
        }
    }
    let timing = Timing {
        delays,
        ..model.timing().clone()
    };
    AsyncModel::new(automaton, nondet, timing)
}
