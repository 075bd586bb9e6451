use std::fs;
use std::path::Path;
use std::process::Command;

use bdproc::{corpus, format};

fn bdproc(args: &[&str]) -> (i32, String, String) {
    bdproc_env(args, &[])
}

fn bdproc_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bdproc"))
        .args(args)
        .envs(env.iter().copied())
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = bdproc(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("classify"));
    let (code, out, _) = bdproc(&["--version"]);
    assert_eq!((code, out.trim()), (0, "bdproc 0.1.0"));
}

#[test]
fn usage_errors_exit_four() {
    assert_eq!(bdproc(&[]).0, 4);
    assert_eq!(bdproc(&["frobnicate"]).0, 4);
    assert_eq!(bdproc(&["classify", "no-such-net"]).0, 4);
    assert_eq!(bdproc(&["fire", "fig1", "--step", "zz"]).0, 4);
}

#[test]
fn validate_reports_syntax_errors_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "g.net", &format::serialize_net(&corpus::fig1()));
    let (code, out, _) = bdproc(&["validate", &good]);
    assert_eq!(code, 0);
    assert_eq!(out, "valid: fig1 (5 places, 3 transitions)\n");
    let bad = write(dir.path(), "b.net", "net x\nplace p @1\nbogus line\n");
    let (code, _, err) = bdproc(&["validate", &bad]);
    assert_eq!(code, 3);
    assert!(err.contains("line 3"), "{err}");
    let empty_preset = write(dir.path(), "e.net", "net x\nplace p\ntrans t\narc t -> p\n");
    assert_eq!(bdproc(&["validate", &empty_preset]).0, 3);
}

#[test]
fn fire_steps_and_sequences() {
    let (code, out, _) = bdproc(&["fire", "fig1", "--step", "a,b"]);
    assert_eq!((code, out.as_str()), (0, "{3, 4, 4}\n"));
    let (code, out, _) = bdproc(&["fire", "fig1", "--seq", "a b c"]);
    assert_eq!((code, out.as_str()), (0, "{4, 5}\n"));
    let (code, out, _) = bdproc(&["fire", "fig2", "--seq", "a b c"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("not enabled"), "{out}");
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m", "3, 4\n");
    let (code, out, _) = bdproc(&["fire", "fig1", "--step", "c", "--marking", &m]);
    assert_eq!((code, out.as_str()), (0, "{5}\n"));
}

#[test]
fn reach_flags_truncation() {
    let (code, out, _) = bdproc(&["reach", "fig1"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("7 markings, 9 edges, complete\n"), "{out}");
    let (code, out, _) = bdproc(&["reach", "fig1", "--cap", "2"]);
    assert_eq!(code, 2);
    assert!(out.ends_with("truncated\n"));
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("n.dot");
    assert_eq!(bdproc(&["reach", "fig1", "--dot", dot.to_str().unwrap()]).0, 0);
    assert!(fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn classify_text_and_json() {
    let (code, out, _) = bdproc(&["classify", "fig3"]);
    assert_eq!(code, 0);
    assert!(out.contains("persistent=holds\n"));
    assert!(
        out.contains("binary_conflict_free=fails  witness binary: {t, u} at {p}\n"),
        "{out}"
    );
    let (code, out, _) = bdproc(&["classify", "fig5", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdicts"]["conflict_free"], "holds");
    assert_eq!(v["verdicts"]["structural_conflict_net"], "fails");
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    // a reachable conflict is still found within a cap of one marking
    let (code, out, _) = bdproc(&["classify", "fig2", "--cap", "1"]);
    assert_eq!(code, 2);
    assert!(out.contains("conflict_free=fails"), "{out}");
}

#[test]
fn unfold_writes_processes_that_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = bdproc(&["unfold", "fig1", "--depth", "3", "--out", d, "--dot", d]);
    assert_eq!(code, 0);
    assert!(out.starts_with("8 processes, 2 maximal, complete\n"));
    let net = corpus::fig1();
    for i in 0..8 {
        let text = fs::read_to_string(dir.path().join(format!("p{i}.proc"))).unwrap();
        format::parse_process(&text, &net).unwrap();
        assert!(dir.path().join(format!("p{i}.dot")).exists());
    }
    let (code, _, _) = bdproc(&["unfold", "fig3", "--depth", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn equiv_and_order_on_fig1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (_, out, _) = bdproc(&["unfold", "fig1", "--depth", "3", "--out", d]);
    let names: Vec<&str> = out
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    let path = |i: usize| format!("{d}/{}.proc", names[i]);
    let events = |i: usize| {
        out.lines()
            .nth(i + 1)
            .unwrap()
            .split_whitespace()
            .nth(1)
            .unwrap()
            .to_string()
    };
    let maximal: Vec<usize> = (0..8)
        .filter(|&i| out.lines().nth(i + 1).unwrap().contains("maximal"))
        .collect();
    let (m1, m2) = (path(maximal[0]), path(maximal[1]));
    let (code, out2, _) = bdproc(&["equiv", "fig1", &m1, &m2]);
    assert_eq!(code, 0, "{out2}");
    assert!(out2.starts_with("holds\npath length 1: swap("));
    let (code, out2, _) = bdproc(&["order", "fig1", &m1, &m2]);
    assert_eq!((code, out2.as_str()), (0, "equivalent\n"));
    let empty = (0..8).find(|&i| events(i) == "events=0").unwrap();
    let (code, out2, _) = bdproc(&["order", "fig1", &path(empty), &m1]);
    assert_eq!((code, out2.as_str()), (0, "below\n"));
    let (code, out2, _) = bdproc(&["order", "fig1", &m1, &path(empty)]);
    assert_eq!((code, out2.as_str()), (0, "above\n"));
    let (code, out2, _) = bdproc(&["equiv", "fig1", &path(empty), &m1]);
    assert_eq!((code, out2.lines().next().unwrap()), (1, "fails"));
}

#[test]
fn budget_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (_, out, _) = bdproc(&["unfold", "fig2", "--depth", "4", "--out", d]);
    let maximal: Vec<String> = out
        .lines()
        .filter(|l| l.contains(" maximal "))
        .map(|l| format!("{d}/{}.proc", l.split_whitespace().next().unwrap()))
        .collect();
    // pick a pair that needs more than one swap
    let pair = maximal
        .iter()
        .flat_map(|a| maximal.iter().map(move |b| (a, b)))
        .find(|(a, b)| {
            let (_, o, _) = bdproc(&["equiv", "fig2", a, b]);
            o.lines()
                .nth(1)
                .is_some_and(|l| !l.starts_with("path length 0") && !l.starts_with("path length 1"))
        })
        .expect("a pair two swaps apart");
    let (code, out, _) = bdproc_env(&["equiv", "fig2", pair.0, pair.1], &[("BDPROC_BUDGET", "1")]);
    assert_eq!((code, out.lines().next().unwrap()), (2, "unknown"), "{out}");
    let (code, _, _) = bdproc_env(
        &["equiv", "fig2", pair.0, pair.1, "--budget", "1000"],
        &[("BDPROC_BUDGET", "1")],
    );
    assert_eq!(code, 0);
}

#[test]
fn process_for_the_wrong_net_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    bdproc(&["unfold", "fig1", "--depth", "1", "--out", d]);
    let p = format!("{d}/p1.proc");
    let (code, _, err) = bdproc(&["equiv", "fig3", &p, &p]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn check_one_net_and_corpus() {
    let (code, out, _) = bdproc(&["check", "fig1", "--depth", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdicts"]["fig1"]["unique-maximal"], "holds");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = bdproc(&["corpus", "--out", d]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), corpus::corpus().len());
    let fig2 = format!("{d}/fig2.net");
    let net = format::parse_net(&fs::read_to_string(&fig2).unwrap()).unwrap();
    assert_eq!(net, corpus::fig2());
    // a net read from a file is checked without recorded expectations
    let (code, out, _) = bdproc(&["check", &fig2, "--depth", "3"]);
    assert_eq!(code, 0, "{out}");
}
