//! Graphviz export: places and conditions as circles, transitions and
//! events as boxes.

use std::fmt::Write;

use crate::net::{Marking, Net, Node};
use crate::process::Process;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn tokens(k: u64) -> String {
    match k {
        0 => String::new(),
        1..=4 => "•".repeat(k as usize),
        _ => k.to_string(),
    }
}

/// The net with its initial marking.
pub fn net_to_dot(net: &Net) -> String {
    net_with_marking_to_dot(net, net.initial_marking())
}

/// The net with tokens drawn from `m`.
pub fn net_with_marking_to_dot(net: &Net, m: &Marking) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n", quote(net.name()));
    for p in net.places() {
        let name = net.place_name(p);
        let label = tokens(m.get(&p));
        writeln!(
            out,
            "  {} [shape=circle, label={}, xlabel={}];",
            quote(&format!("p:{name}")),
            quote(&label),
            quote(name)
        )
        .unwrap();
    }
    for t in net.transitions() {
        let name = net.transition_name(t);
        writeln!(
            out,
            "  {} [shape=box, label={}];",
            quote(&format!("t:{name}")),
            quote(name)
        )
        .unwrap();
    }
    let id = |n: Node| match n {
        Node::Place(p) => format!("p:{}", net.place_name(p)),
        Node::Transition(t) => format!("t:{}", net.transition_name(t)),
    };
    for t in net.transitions() {
        let arcs = net
            .pre(t)
            .iter()
            .map(|(&p, w)| (Node::Place(p), Node::Transition(t), w))
            .chain(
                net.post(t)
                    .iter()
                    .map(|(&p, w)| (Node::Transition(t), Node::Place(p), w)),
            );
        for (x, y, w) in arcs {
            write!(out, "  {} -> {}", quote(&id(x)), quote(&id(y))).unwrap();
            if w > 1 {
                write!(out, " [label={}]", quote(&w.to_string())).unwrap();
            }
            out.push_str(";\n");
        }
    }
    out.push_str("}\n");
    out
}

/// A process; every node is annotated with its label in `net`.
pub fn process_to_dot(process: &Process, net: &Net, name: &str) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n", quote(name));
    for (c, cond) in process.conditions() {
        let label = format!("{c}\n{}", net.place_name(cond.place));
        writeln!(
            out,
            "  {} [shape=circle, label={}];",
            quote(&c.to_string()),
            quote(&label)
        )
        .unwrap();
    }
    for (e, ev) in process.events() {
        let label = format!("{e}\n{}", net.transition_name(ev.transition));
        writeln!(
            out,
            "  {} [shape=box, label={}];",
            quote(&e.to_string()),
            quote(&label)
        )
        .unwrap();
    }
    for (e, ev) in process.events() {
        for c in &ev.preset {
            writeln!(out, "  {} -> {};", quote(&c.to_string()), quote(&e.to_string())).unwrap();
        }
        for c in &ev.postset {
            writeln!(out, "  {} -> {};", quote(&e.to_string()), quote(&c.to_string())).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
