//! Plain-text formats for nets, processes and markings.
//!
//! ```text
//! net fig3
//! place p @1
//! trans t
//! trans u
//! arc p -> t
//! arc t -> p *1    # weights default to 1
//! ```
//!
//! ```text
//! process run of fig3
//! cond c0 : p
//! event e0 : t
//! arc c0 -> e0
//! ```

use std::collections::HashMap;
use std::fmt::Write;

use crate::net::{InvalidNet, Marking, Net, NetDescription};
use crate::process::{InvalidProcess, Process, ProcessDescription};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: syntax error: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: `{id}` is declared more than once")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: `{id}` is not declared")]
    DanglingRef { line: usize, id: String },
    #[error(transparent)]
    InvalidNet(#[from] InvalidNet),
    #[error(transparent)]
    InvalidProcess(#[from] InvalidProcess),
}

impl FormatError {
    /// The offending line, for errors detected by the parser itself.
    pub fn line(&self) -> Option<usize> {
        match self {
            FormatError::SyntaxError { line, .. }
            | FormatError::DuplicateId { line, .. }
            | FormatError::DanglingRef { line, .. } => Some(*line),
            _ => None,
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::SyntaxError {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, split into words, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let words: Vec<&str> = l.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn number(line: usize, word: &str, prefix: char) -> Result<u64, FormatError> {
    word.strip_prefix(prefix)
        .and_then(|n| n.parse::<u64>().ok())
        .ok_or_else(|| syntax(line, format!("expected {prefix}<number>, found `{word}`")))
}

/// Parses the net format without validating the net.
pub fn parse_net_description(text: &str) -> Result<NetDescription, FormatError> {
    let mut desc: Option<NetDescription> = None;
    let mut declared: HashMap<String, usize> = HashMap::new();
    let mut arcs: Vec<(usize, String, String, u64)> = Vec::new();
    for (line, words) in lines(text) {
        let Some(d) = desc.as_mut() else {
            match words.as_slice() {
                ["net", name] => desc = Some(NetDescription::new(*name)),
                _ => return Err(syntax(line, "expected `net <name>`")),
            }
            continue;
        };
        let mut declare = |id: &str| {
            if declared.insert(id.to_string(), line).is_some() {
                Err(FormatError::DuplicateId {
                    line,
                    id: id.to_string(),
                })
            } else {
                Ok(())
            }
        };
        match words.as_slice() {
            ["place", id] => {
                declare(id)?;
                d.places.push((id.to_string(), 0));
            }
            ["place", id, tokens] => {
                let k = number(line, tokens, '@')?;
                declare(id)?;
                d.places.push((id.to_string(), k));
            }
            ["trans", id] => {
                declare(id)?;
                d.transitions.push(id.to_string());
            }
            ["arc", src, "->", dst] => arcs.push((line, src.to_string(), dst.to_string(), 1)),
            ["arc", src, "->", dst, w] => {
                let w = number(line, w, '*')?;
                if w == 0 {
                    return Err(syntax(line, "arc weight must be at least 1"));
                }
                arcs.push((line, src.to_string(), dst.to_string(), w));
            }
            _ => return Err(syntax(line, format!("unrecognised line `{}`", words.join(" ")))),
        }
    }
    let mut desc = desc.ok_or_else(|| syntax(1, "missing `net <name>` header"))?;
    for (line, src, dst, w) in arcs {
        for id in [&src, &dst] {
            if !declared.contains_key(id) {
                return Err(FormatError::DanglingRef { line, id: id.clone() });
            }
        }
        desc.arcs.push((src, dst, w));
    }
    Ok(desc)
}

pub fn parse_net(text: &str) -> Result<Net, FormatError> {
    Ok(parse_net_description(text)?.validate()?)
}

pub fn serialize_net(net: &Net) -> String {
    let d = net.describe();
    let mut out = format!("net {}\n", d.name);
    for (p, k) in &d.places {
        if *k > 0 {
            writeln!(out, "place {p} @{k}").unwrap();
        } else {
            writeln!(out, "place {p}").unwrap();
        }
    }
    for t in &d.transitions {
        writeln!(out, "trans {t}").unwrap();
    }
    for (s, t, w) in &d.arcs {
        if *w > 1 {
            writeln!(out, "arc {s} -> {t} *{w}").unwrap();
        } else {
            writeln!(out, "arc {s} -> {t}").unwrap();
        }
    }
    out
}

/// Parses the process format; place and transition names are resolved
/// against `net` later, by [`parse_process`].
pub fn parse_process_description(text: &str) -> Result<ProcessDescription, FormatError> {
    let mut desc: Option<ProcessDescription> = None;
    let mut declared: HashMap<String, usize> = HashMap::new();
    let mut arcs: Vec<(usize, String, String)> = Vec::new();
    for (line, words) in lines(text) {
        let Some(d) = desc.as_mut() else {
            match words.as_slice() {
                ["process", name, "of", net] => {
                    desc = Some(ProcessDescription {
                        name: name.to_string(),
                        net: net.to_string(),
                        ..Default::default()
                    })
                }
                _ => return Err(syntax(line, "expected `process <name> of <net>`")),
            }
            continue;
        };
        match words.as_slice() {
            [kind @ ("cond" | "event"), id, ":", label] => {
                if declared.insert(id.to_string(), line).is_some() {
                    return Err(FormatError::DuplicateId {
                        line,
                        id: id.to_string(),
                    });
                }
                let entry = (id.to_string(), label.to_string());
                if *kind == "cond" {
                    d.conditions.push(entry);
                } else {
                    d.events.push(entry);
                }
            }
            ["arc", src, "->", dst] => arcs.push((line, src.to_string(), dst.to_string())),
            _ => return Err(syntax(line, format!("unrecognised line `{}`", words.join(" ")))),
        }
    }
    let mut desc = desc.ok_or_else(|| syntax(1, "missing `process <name> of <net>` header"))?;
    for (line, src, dst) in arcs {
        for id in [&src, &dst] {
            if !declared.contains_key(id) {
                return Err(FormatError::DanglingRef { line, id: id.clone() });
            }
        }
        desc.arcs.push((src, dst));
    }
    Ok(desc)
}

/// Parses a process of `net`. The header must name `net`, and every label
/// must be a place or transition of it.
pub fn parse_process(text: &str, net: &Net) -> Result<Process, FormatError> {
    let desc = parse_process_description(text)?;
    let line_of = |id: &str| {
        lines(text)
            .find(|(_, w)| w.get(1) == Some(&id) && matches!(w[0], "cond" | "event"))
            .map_or(1, |(l, _)| l)
    };
    if desc.net != net.name() {
        let header = lines(text).next().map_or(1, |(l, _)| l);
        return Err(FormatError::DanglingRef {
            line: header,
            id: desc.net,
        });
    }
    for (c, place) in &desc.conditions {
        if net.place(place).is_none() {
            return Err(FormatError::DanglingRef {
                line: line_of(c),
                id: place.clone(),
            });
        }
    }
    for (e, t) in &desc.events {
        if net.transition(t).is_none() {
            return Err(FormatError::DanglingRef {
                line: line_of(e),
                id: t.clone(),
            });
        }
    }
    Ok(desc.validate(net)?)
}

pub fn serialize_process(process: &Process, net: &Net, name: &str) -> String {
    let d = process.describe(net, name);
    let mut out = format!("process {} of {}\n", d.name, d.net);
    for (c, p) in &d.conditions {
        writeln!(out, "cond {c} : {p}").unwrap();
    }
    for (e, t) in &d.events {
        writeln!(out, "event {e} : {t}").unwrap();
    }
    for (s, t) in &d.arcs {
        writeln!(out, "arc {s} -> {t}").unwrap();
    }
    out
}

/// Parses a marking: place names separated by whitespace or commas, each
/// optionally followed by `*k`; repeated names add up.
pub fn parse_marking(text: &str, net: &Net) -> Result<Marking, FormatError> {
    let mut m = Marking::new();
    for (line, words) in lines(text) {
        for word in words.iter().flat_map(|w| w.split(',')).filter(|w| !w.is_empty()) {
            let (name, k) = match word.split_once('*') {
                Some((name, k)) => (name, number(line, &format!("*{k}"), '*')?),
                None => (word, 1),
            };
            let p = net.place(name).ok_or_else(|| FormatError::DanglingRef {
                line,
                id: name.to_string(),
            })?;
            m.try_insert(p, k)
                .map_err(|_| syntax(line, "token count overflow"))?;
        }
    }
    Ok(m)
}
