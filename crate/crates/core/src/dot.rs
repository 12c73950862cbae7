//! Graphviz export. Callback edges are drawn as double lines.

use std::fmt::Write;

use crate::interface::{InterfaceAutomaton, Label};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT text for an interface automaton. Output is stable: states in index
/// order, edges in the order of [`InterfaceAutomaton::transitions`].
pub fn export_dot(a: &InterfaceAutomaton) -> String {
    let mut out = String::new();
    out.push_str("digraph typestate {\n  rankdir=LR;\n  node [shape=circle];\n");
    for s in 0..a.state_count() {
        let extra = if s == a.initial() { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  s{s} [label={}{extra}];", quote(a.state_name(s)));
    }
    for t in a.transitions() {
        let style = match t.label {
            Label::Callin(_) => String::new(),
            Label::Callback(_) => ", color=\"black:invis:black\"".to_string(),
        };
        let _ = writeln!(
            out,
            "  s{} -> s{} [label={}{style}];",
            t.from,
            t.to,
            quote(a.label_name(t.label))
        );
    }
    out.push_str("}\n");
    out
}
