//! JSON reports. Keys are sorted and nothing run-dependent (times, paths)
//! is recorded, so identical inputs give byte-identical output.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::conflict::{Classification, ConflictWitness};
use crate::harness::{Budgets, CheckReport};
use crate::net::{Marking, Net, Step};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn marking_names(net: &Net, m: &Marking) -> Vec<String> {
    m.expanded().map(|&p| net.place_name(p).to_string()).collect()
}

fn step_names(net: &Net, g: &Step) -> Vec<String> {
    g.expanded()
        .map(|&t| net.transition_name(t).to_string())
        .collect()
}

pub fn witness_json(net: &Net, property: &str, w: &ConflictWitness) -> Value {
    json!({
        "property": property,
        "kind": w.kind.as_str(),
        "marking": marking_names(net, &w.marking),
        "multiset": step_names(net, &w.multiset),
        "path": w.path.iter().map(|&t| net.transition_name(t)).collect::<Vec<_>>(),
    })
}

fn verdicts_json(c: &Classification) -> Value {
    let map: BTreeMap<&str, &str> = c
        .outcomes()
        .iter()
        .map(|(n, o)| (*n, o.verdict.as_str()))
        .collect();
    json!(map)
}

fn witnesses_json(net: &Net, c: &Classification, tag: Option<&str>) -> Vec<Value> {
    c.outcomes()
        .iter()
        .filter_map(|(n, o)| {
            o.witness.as_ref().map(|w| {
                let mut v = witness_json(net, n, w);
                if let Some(tag) = tag {
                    v["net"] = json!(tag);
                }
                v
            })
        })
        .collect()
}

fn pairs_json(net: &Net, c: &Classification) -> Value {
    json!(c
        .structural_conflict_pairs
        .iter()
        .map(|&(t, u)| [net.transition_name(t), net.transition_name(u)])
        .collect::<Vec<_>>())
}

/// Report for `classify`.
pub fn classification_report(net: &Net, c: &Classification) -> Value {
    json!({
        "tool_version": TOOL_VERSION,
        "net": net.name(),
        "budgets": { "markings": c.exploration.cap },
        "verdicts": verdicts_json(c),
        "witnesses": witnesses_json(net, c, None),
        "structural_conflict_pairs": pairs_json(net, c),
        "exploration": c.exploration,
        "checks": [],
    })
}

/// One net's contribution to a `check` report.
pub struct CheckedNet<'a> {
    pub name: String,
    pub net: &'a Net,
    pub classification: Classification,
    pub checks: Vec<CheckReport>,
}

/// Report for `check`, over one or more nets.
pub fn check_report(label: &str, budgets: Budgets, nets: &[CheckedNet]) -> Value {
    let mut verdicts = serde_json::Map::new();
    let mut witnesses = Vec::new();
    let mut checks = Vec::new();
    for n in nets {
        let mut per: BTreeMap<String, &str> = BTreeMap::new();
        for r in &n.checks {
            per.insert(r.check_id.clone(), r.verdict.as_str());
        }
        verdicts.insert(n.name.clone(), json!(per));
        witnesses.extend(witnesses_json(n.net, &n.classification, Some(&n.name)));
        checks.extend(
            n.checks
                .iter()
                .map(|r| serde_json::to_value(r).expect("plain data")),
        );
    }
    json!({
        "tool_version": TOOL_VERSION,
        "net": label,
        "budgets": budgets,
        "verdicts": verdicts,
        "witnesses": witnesses,
        "checks": checks,
    })
}

/// Pretty-printed with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}
