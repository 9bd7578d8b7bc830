//! Graphviz output for influence graphs and reachability graphs.

use std::fmt::Write;

use crate::chronology::Chronology;
use crate::event::EventId;
use crate::influence::InfluenceGraph;
use crate::model::Model;
use crate::reachability::ReachabilityGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Events as vertices. Strong edges are solid, weak-only edges dashed, and
/// ≺ pairs not already drawn as strong edges dotted.
pub fn influence_dot(ig: &InfluenceGraph, chronology: &Chronology) -> String {
    let name = |e: EventId| quote(&ig.event_names[e.0]);
    let mut out = String::from("digraph influence {\n");
    for n in &ig.event_names {
        writeln!(out, "  {};", quote(n)).unwrap();
    }
    for &(e, f) in ig.strong.keys() {
        writeln!(out, "  {} -> {} [style=solid, label=\"strong\"];", name(e), name(f)).unwrap();
    }
    for &(e, f) in ig.weak.keys() {
        if !ig.strong.contains_key(&(e, f)) {
            writeln!(out, "  {} -> {} [style=dashed, label=\"weak\"];", name(e), name(f)).unwrap();
        }
    }
    for (e, f) in chronology.pairs() {
        if !ig.strong.contains_key(&(e, f)) {
            writeln!(out, "  {} -> {} [style=dotted, label=\"precedes\"];", name(e), name(f)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Nodes labelled with record state and occurred events; edges with event names.
pub fn reachability_dot(model: &Model, graph: &ReachabilityGraph) -> String {
    let mut out = String::from("digraph reachability {\n");
    for id in graph.node_ids() {
        let node = graph.node(id);
        let occurred: Vec<&str> = node.occurred.iter().map(|e| model.event(e).name()).collect();
        let label = format!("{}\\n[{}]", model.display_state(&node.state), occurred.join(","));
        let style = if model.is_consistent(&node.state) { "" } else { ", color=red" };
        writeln!(out, "  n{} [label={}{}];", id.0, quote(&label).replace("\\\\n", "\\n"), style).unwrap();
    }
    for edge in graph.edges() {
        let style = if edge.violations.is_empty() { "" } else { ", color=red" };
        writeln!(
            out,
            "  n{} -> n{} [label={}{}];",
            edge.source.0,
            edge.target.0,
            quote(model.event(edge.event).name()),
            style
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
