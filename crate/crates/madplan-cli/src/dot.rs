//! DOT rendering of Kripke structures.
//!
//! Output is deterministic: one node line per state in name order, one
//! edge line per arc sorted by agent and then endpoints. Node labels
//! show the state name and its true fluents; the real state, when
//! given, is drawn with a double border (`peripheries=2`).

use std::fmt::Write as _;

use madplan::model::{KripkeStructure, StateId};

/// Escapes a string for use inside a double-quoted DOT value.
fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders `m` as a DOT digraph, double-bordering `real` when present.
pub fn to_dot(m: &KripkeStructure, real: Option<&StateId>) -> String {
    let mut out = String::from("digraph kripke {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    for (id, interp) in m.states() {
        let atoms: Vec<String> = interp.true_atoms().map(|a| a.to_string()).collect();
        let mut label = escape(id.as_str());
        if !atoms.is_empty() {
            label.push_str("\\n");
            label.push_str(&escape(&atoms.join(", ")));
        }
        let border = if real == Some(id) { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  \"{}\" [label=\"{label}\"{border}];", escape(id.as_str()));
    }
    for (from, agent, to) in m.arcs() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            escape(from.as_str()),
            escape(to.as_str()),
            escape(agent.as_str())
        );
    }
    out.push_str("}\n");
    out
}
