//! Bounded re-verification of the relationships between conflict notions,
//! maximal processes and swapping on concrete nets.
//!
//! Every check produces a [`CheckReport`] whose verdict reads: `holds` when
//! everything the check could establish agrees with the statement under
//! test and with the recorded expectations, `fails` on a contradiction
//! (with a witness), `unknown` when the bounds did not allow a conclusion.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::conflict::{classify_graph, Classification};
use crate::corpus::{CorpusNet, Expectations};
use crate::enumerate::Unfolding;
use crate::net::{Net, TransitionId};
use crate::process::{CondId, Process};
use crate::reach::MarkingGraph;
use crate::swapping::{bd_preorder_fin, effective_moves, is_legal, swap, swap_equiv, SwapClass, SwapMove};
use crate::verdict::Verdict;

/// Bounds used by a harness run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    /// Maximal number of events per enumerated process.
    pub depth: usize,
    /// Isomorphism classes kept by the process enumeration.
    pub processes: usize,
    /// Markings kept by the marking-graph exploration.
    pub markings: usize,
    /// Canonical forms per swapping search.
    pub swaps: usize,
}

impl Budgets {
    pub fn with_depth(depth: usize) -> Self {
        Budgets {
            depth,
            processes: 20_000,
            markings: 10_000,
            swaps: crate::default_budget(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub net: String,
    pub verdict: Verdict,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub budgets: Budgets,
}

/// Compact rendering of a process: `e0:a[c0:1 > c3:4]` per event, followed
/// by the conditions without producer.
pub fn show_process(p: &Process, net: &Net) -> String {
    let cond = |c: &CondId| format!("{c}:{}", net.place_name(p.conditions()[c].place));
    let initial: Vec<String> = p.initial_conditions().map(|c| cond(&c)).collect();
    let mut out = format!("{{{}}}", initial.join(" "));
    for (e, ev) in p.events() {
        let pre: Vec<String> = ev.preset.iter().map(cond).collect();
        let post: Vec<String> = ev.postset.iter().map(cond).collect();
        out.push_str(&format!(
            " {e}:{}[{} > {}]",
            net.transition_name(ev.transition),
            pre.join(" "),
            post.join(" ")
        ));
    }
    out
}

fn show_moves(moves: &[SwapMove]) -> String {
    let m: Vec<String> = moves.iter().map(|m| format!("swap({},{})", m.p, m.q)).collect();
    if m.is_empty() {
        "no swaps".to_string()
    } else {
        m.join(" ")
    }
}

/// Everything the checks share for one net: the marking graph, the
/// classification, the enumerated processes and their `≡₁*`-classes.
#[derive(Debug, Clone)]
pub struct Analysis<'a> {
    pub name: String,
    pub net: &'a Net,
    pub budgets: Budgets,
    pub graph: MarkingGraph,
    pub classification: Classification,
    pub unfolding: Unfolding,
    class: Vec<usize>,
    /// Every swap of every enumerated process landed inside the enumeration.
    classes_exact: bool,
}

impl<'a> Analysis<'a> {
    pub fn new(name: &str, net: &'a Net, budgets: Budgets) -> Self {
        let graph = MarkingGraph::explore(net, budgets.markings);
        let classification = classify_graph(net, &graph);
        let unfolding = Unfolding::explore(net, budgets.depth, budgets.processes);
        let n = unfolding.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut classes_exact = true;
        for i in 0..n {
            let p = &unfolding.processes[i].process;
            for m in effective_moves(p) {
                let q = swap(p, m).expect("effective moves are legal");
                match unfolding.index_of(&q.canonical_form()) {
                    Some(j) => {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a.max(b)] = a.min(b);
                    }
                    None => classes_exact = false,
                }
            }
        }
        let class = (0..n).map(|i| find(&mut parent, i)).collect();
        Analysis {
            name: name.to_string(),
            net,
            budgets,
            graph,
            classification,
            unfolding,
            class,
            classes_exact,
        }
    }

    /// Class id (least member index) of enumerated process `i`.
    pub fn class_of(&self, i: usize) -> usize {
        self.class[i]
    }

    /// True iff the enumeration holds every finite process of the net.
    pub fn finite(&self) -> bool {
        self.unfolding.complete
    }

    /// True iff the net is a structural conflict net and the marking graph
    /// was explored completely.
    pub fn structural_conflict_net(&self) -> Verdict {
        self.classification.structural_conflict_net.verdict
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.unfolding.len())
            .filter(|&i| self.unfolding.processes[i].maximal)
            .collect()
    }

    pub fn maximal_classes(&self) -> BTreeSet<usize> {
        self.maximal().into_iter().map(|i| self.class[i]).collect()
    }

    /// For every enumerated process, the classes of its enumerated
    /// extensions (itself included).
    fn extension_classes(&self) -> Vec<BTreeSet<usize>> {
        let n = self.unfolding.len();
        let mut ext: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for i in (0..n).rev() {
            let mut s = BTreeSet::from([self.class[i]]);
            for &(_, j) in &self.unfolding.processes[i].successors {
                s.extend(ext[j].iter().copied());
            }
            ext[i] = s;
        }
        ext
    }

    /// Whether every two enumerated processes have a common extension up to
    /// `≡₁*`. `Fails` carries a pair without one and is only returned when
    /// the enumeration is complete; for truncated enumerations only pairs
    /// of processes with at most half the depth are considered, and a
    /// missing common extension gives `Unknown`.
    pub fn directedness(&self) -> (Verdict, Option<(usize, usize)>) {
        let ext = self.extension_classes();
        let n = self.unfolding.len();
        let half = self.budgets.depth / 2;
        let considered: Vec<usize> = (0..n)
            .filter(|&i| self.finite() || self.unfolding.processes[i].process.event_count() <= half)
            .collect();
        for (a, &i) in considered.iter().enumerate() {
            for &j in &considered[a + 1..] {
                if ext[i].is_disjoint(&ext[j]) {
                    let v = if self.finite() && self.classes_exact {
                        Verdict::Fails
                    } else {
                        Verdict::Unknown
                    };
                    return (v, Some((i, j)));
                }
            }
        }
        (Verdict::Holds, None)
    }

    fn report(&self, id: &str, verdict: Verdict, detail: String, witness: Option<String>) -> CheckReport {
        CheckReport {
            check_id: id.to_string(),
            net: self.name.clone(),
            verdict,
            detail,
            witness,
            budgets: self.budgets,
        }
    }

    fn show(&self, i: usize) -> String {
        show_process(&self.unfolding.processes[i].process, self.net)
    }
}

/// Collects disagreements; the first one becomes the witness.
#[derive(Default)]
struct Findings {
    notes: Vec<String>,
    failure: Option<String>,
    unknown: bool,
}

impl Findings {
    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn fail(&mut self, s: impl Into<String>) {
        let s = s.into();
        self.notes.push(format!("MISMATCH {s}"));
        if self.failure.is_none() {
            self.failure = Some(s);
        }
    }

    fn verdict(&self) -> Verdict {
        if self.failure.is_some() {
            Verdict::Fails
        } else if self.unknown {
            Verdict::Unknown
        } else {
            Verdict::Holds
        }
    }
}

/// Compares the classification with recorded expectations.
pub fn check_classification(a: &Analysis, expected: &Expectations) -> CheckReport {
    let c = &a.classification;
    let mut f = Findings::default();
    let pairs = [
        (
            "binary_conflict_free",
            c.binary_conflict_free.verdict,
            expected.binary_conflict_free,
        ),
        ("conflict_free", c.conflict_free.verdict, expected.conflict_free),
        (
            "has_reachable_structural_conflict",
            c.has_reachable_structural_conflict.verdict,
            expected.reachable_structural_conflict,
        ),
        ("persistent", c.persistent.verdict, expected.persistent),
        (
            "structural_conflict_net",
            c.structural_conflict_net.verdict,
            expected.structural_conflict_net,
        ),
    ];
    for (name, got, want) in pairs {
        match want {
            Some(w) if w != got => f.fail(format!("{name}={got}, expected {w}")),
            _ => f.note(format!("{name}={got}")),
        }
    }
    let has_pairs = !c.structural_conflict_pairs.is_empty();
    match expected.has_structural_conflict_pairs {
        Some(w) if w != has_pairs => f.fail(format!(
            "structural conflict pairs present={has_pairs}, expected {w}"
        )),
        _ => f.note(format!(
            "structural conflict pairs={}",
            c.structural_conflict_pairs.len()
        )),
    }
    // consequences that hold on every net
    let bcf = c.binary_conflict_free.verdict.definite();
    let per = c.persistent.verdict.definite();
    if bcf == Some(true) && per == Some(false) {
        f.fail("binary-conflict-free but not persistent");
    }
    if c.structural_conflict_net.verdict == Verdict::Holds
        && c.exploration.complete
        && c.conflict_free.verdict != c.binary_conflict_free.verdict
    {
        f.fail("structural conflict net where conflict-freeness and binary-conflict-freeness differ");
    }
    if a.graph.is_complete() && a.graph.is_safe() && c.structural_conflict_net.verdict != Verdict::Holds {
        f.fail("safe net not classified as structural conflict net");
    }
    for (name, o) in c.outcomes() {
        if let Some(w) = &o.witness {
            if !w.replays(a.net) {
                f.fail(format!("{name} witness does not replay: {}", w.show(a.net)));
            }
        }
    }
    let witness = f.failure.clone();
    a.report("classify", f.verdict(), f.notes.join("; "), witness)
}

/// Maximal processes and their classes: a conflict-free structural conflict
/// net has exactly one class, a structural conflict net with a conflict has
/// several.
pub fn check_unique_maximal(a: &Analysis, expected: &Expectations) -> CheckReport {
    let mut f = Findings::default();
    if !a.finite() {
        f.unknown = true;
        f.note(format!(
            "process set not exhausted at depth {} ({} processes enumerated)",
            a.budgets.depth,
            a.unfolding.len()
        ));
        return a.report("unique-maximal", f.verdict(), f.notes.join("; "), None);
    }
    let maximal = a.maximal();
    let classes = a.maximal_classes();
    f.note(format!(
        "{} maximal processes in {} classes",
        maximal.len(),
        classes.len()
    ));
    // cross-check the class partition with the independent pairwise search
    for (k, &i) in maximal.iter().enumerate() {
        for &j in &maximal[k + 1..] {
            let (p, q) = (
                &a.unfolding.processes[i].process,
                &a.unfolding.processes[j].process,
            );
            let eq = swap_equiv(p, q, a.budgets.swaps);
            let same = a.class_of(i) == a.class_of(j);
            match eq.verdict.definite() {
                Some(v) if v != same => f.fail(format!(
                    "swap_equiv={} but class partition says {} for {} and {}",
                    eq.verdict,
                    same,
                    a.show(i),
                    a.show(j)
                )),
                None => f.unknown = true,
                _ => {}
            }
        }
    }
    if let Some(w) = expected.maximal_processes {
        if w != maximal.len() {
            f.fail(format!("expected {w} maximal processes"));
        }
    }
    if let Some(w) = expected.maximal_classes {
        if w != classes.len() {
            f.fail(format!("expected {w} classes"));
        }
    }
    let c = &a.classification;
    if a.structural_conflict_net() == Verdict::Holds {
        match c.conflict_free.verdict {
            Verdict::Holds if classes.len() != 1 => {
                let mut it = classes.iter();
                let (x, y) = (*it.next().unwrap(), *it.next().unwrap());
                f.fail(format!(
                    "conflict-free structural conflict net with {} maximal classes: {} / {}",
                    classes.len(),
                    a.show(x),
                    a.show(y)
                ));
            }
            Verdict::Fails if classes.len() < 2 => {
                f.fail("structural conflict net with a conflict but a single maximal class")
            }
            Verdict::Unknown => f.unknown = true,
            _ => f.note("agrees with conflict-freeness"),
        }
    }
    let witness = f.failure.clone();
    a.report("unique-maximal", f.verdict(), f.notes.join("; "), witness)
}

/// Directedness of the finite processes against conflict-freeness: on
/// structural conflict nets, directed exactly when conflict-free.
pub fn check_largest_bd(a: &Analysis) -> CheckReport {
    let mut f = Findings::default();
    let (directed, pair) = a.directedness();
    let cf = a.classification.conflict_free.verdict;
    let mut witness = None;
    match (directed, pair) {
        (Verdict::Holds, _) => f.note(format!(
            "every pair of {} processes has a common extension",
            a.unfolding.len()
        )),
        (v, Some((i, j))) => {
            f.note(format!("no common extension found ({v}) for a pair"));
            witness = Some(format!("{} | {}", a.show(i), a.show(j)));
        }
        _ => {}
    }
    if !a.finite() && directed == Verdict::Holds {
        f.note(format!("pairs up to {} events only", a.budgets.depth / 2));
    }
    f.note(format!("conflict_free={cf}"));
    if a.structural_conflict_net() == Verdict::Holds {
        match (directed, cf) {
            (Verdict::Fails, Verdict::Holds) => {
                f.fail("conflict-free structural conflict net without directedness")
            }
            (Verdict::Holds, Verdict::Fails) if a.finite() => {
                f.fail("structural conflict net with a conflict whose finite processes are directed")
            }
            (Verdict::Fails, Verdict::Fails) | (Verdict::Holds, Verdict::Holds) => {}
            _ => f.unknown = true,
        }
    } else {
        f.note("not a structural conflict net: recorded only");
    }
    if let (Some(fail), None) = (&f.failure, &witness) {
        witness = Some(fail.clone());
    }
    a.report("largest-bd", f.verdict(), f.notes.join("; "), witness)
}

/// The enumerated processes are prefix-closed and `≡₁`-closed; on
/// conflict-free structural conflict nets with finitely many processes
/// they also form a directed set.
pub fn check_bd_run(a: &Analysis) -> CheckReport {
    let mut f = Findings::default();
    let u = &a.unfolding;
    for e in &u.processes {
        for p in e.process.immediate_prefixes() {
            if !u.contains(&p.canonical_form()) {
                f.fail(format!("prefix missing: {}", show_process(&p, a.net)));
            }
        }
        if e.process.event_count() <= a.budgets.depth {
            for m in effective_moves(&e.process) {
                let q = swap(&e.process, m).expect("legal");
                if !u.contains(&q.canonical_form()) && a.finite() {
                    f.fail(format!("swap missing: {}", show_process(&q, a.net)));
                }
            }
        }
    }
    let applies = a.structural_conflict_net() == Verdict::Holds
        && a.classification.conflict_free.verdict == Verdict::Holds;
    if applies {
        let (d, _) = a.directedness();
        match d {
            Verdict::Fails => f.fail("not directed"),
            Verdict::Unknown => f.unknown = true,
            Verdict::Holds if !a.finite() => {
                f.unknown = true;
                f.note("directed up to the depth bound");
            }
            Verdict::Holds => f.note("directed"),
        }
    } else {
        f.note("directedness not claimed");
    }
    f.note(format!("{} processes", u.len()));
    let witness = f.failure.clone();
    a.report("bd-run", f.verdict(), f.notes.join("; "), witness)
}

/// The process/marking bisimulation, clauses (a) to (d).
pub fn check_bisim(a: &Analysis) -> CheckReport {
    let net = a.net;
    let mut f = Findings::default();
    let u = &a.unfolding;
    let init = &u.processes[0].process;
    if init.event_count() != 0 || init.final_marking() != *net.initial_marking() {
        f.fail("(a) initial process does not end in the initial marking");
    }
    let mut instances = 0usize;
    for e in &u.processes {
        let p = &e.process;
        let hat = p.final_marking();
        // (d) replaying the events in causal order reaches P̂
        let order = p.topological_events().expect("acyclic");
        let labels: Vec<TransitionId> = order.iter().map(|ev| p.events()[ev].transition).collect();
        if net.fire_sequence(net.initial_marking(), &labels).ok() != Some(hat.clone()) {
            f.fail(format!(
                "(d) P̂ not reached by its events: {}",
                show_process(p, net)
            ));
        }
        if a.graph.is_complete() && !a.graph.contains(&hat) {
            f.fail(format!(
                "(d) P̂ not in the marking graph: {}",
                show_process(p, net)
            ));
        }
        if p.event_count() >= a.budgets.depth {
            continue;
        }
        // (b) every concrete one-event extension is mirrored by the marking
        for (t, q) in p.concrete_successors(net) {
            instances += 1;
            if net.fire(&hat, t).ok() != Some(q.final_marking()) || !p.is_prefix_of(&q) {
                f.fail(format!(
                    "(b) {} --{}-->",
                    show_process(p, net),
                    net.transition_name(t)
                ));
            }
        }
        // (c) every enabled transition has a matching extension
        for t in net.enabled_transitions(&hat).collect::<Vec<_>>() {
            let m = net.fire(&hat, t).expect("enabled");
            let ok = e
                .successors
                .iter()
                .any(|&(s, j)| s == t && u.processes[j].process.final_marking() == m);
            if !ok {
                f.fail(format!(
                    "(c) no {}-extension of {}",
                    net.transition_name(t),
                    show_process(p, net)
                ));
            }
        }
    }
    f.note(format!(
        "{} processes, {} transitions checked",
        u.len(),
        instances
    ));
    let witness = f.failure.clone();
    a.report("bisim", f.verdict(), f.notes.join("; "), witness)
}

/// Concrete `a`-successors of `p`.
fn succ(net: &Net, p: &Process, t: TransitionId) -> Vec<Process> {
    p.concrete_successors_by(net, t)
}

impl Analysis<'_> {
    /// `≡₁*` between two processes with at most `depth` events, through the
    /// class partition when both are enumerated.
    fn equivalent(&self, p: &Process, q: &Process) -> Verdict {
        let (fp, fq) = (p.canonical_form(), q.canonical_form());
        if fp == fq {
            return Verdict::Holds;
        }
        if self.finite_classes() {
            if let (Some(i), Some(j)) = (self.unfolding.index_of(&fp), self.unfolding.index_of(&fq)) {
                return Verdict::from_bool(self.class[i] == self.class[j]);
            }
        }
        swap_equiv(p, q, self.budgets.swaps).verdict
    }

    fn finite_classes(&self) -> bool {
        self.classes_exact
    }

    /// Enumerated processes with room for `k` more events.
    fn below(&self, k: usize) -> impl Iterator<Item = &Process> + '_ {
        let limit = self.budgets.depth.saturating_sub(k);
        let enough = self.budgets.depth >= k;
        self.unfolding
            .processes
            .iter()
            .map(|e| &e.process)
            .filter(move |p| enough && p.event_count() <= limit)
    }
}

struct LemmaRun<'a, 'b> {
    a: &'b Analysis<'a>,
    f: Findings,
    instances: usize,
}

impl LemmaRun<'_, '_> {
    fn outcome(&mut self, v: Verdict, what: impl FnOnce() -> String) {
        self.instances += 1;
        match v {
            Verdict::Holds => {}
            Verdict::Fails => self.f.fail(what()),
            Verdict::Unknown => self.f.unknown = true,
        }
    }

    fn finish(self, id: &str) -> CheckReport {
        let mut f = self.f;
        f.note(format!("{} instances", self.instances));
        let witness = f.failure.clone();
        self.a.report(id, f.verdict(), f.notes.join("; "), witness)
    }
}

/// `P →a P'` and `P̂ →{a,b}` give `P' →b Q'` and `P →b Q →a Q'`.
pub fn check_confl(a: &Analysis) -> CheckReport {
    let net = a.net;
    let mut run = LemmaRun {
        a,
        f: Findings::default(),
        instances: 0,
    };
    for p in a.below(2) {
        let hat = p.final_marking();
        for ta in net.transitions() {
            for p1 in succ(net, p, ta) {
                let ea = p1
                    .maximal_events()
                    .into_iter()
                    .find(|e| p.event(*e).is_none())
                    .expect("new event");
                let produced: BTreeSet<CondId> = p1.events()[&ea].postset.iter().copied().collect();
                for tb in net.transitions() {
                    let g = [ta, tb].into_iter().collect();
                    if !net.enabled(&hat, &g).unwrap_or(false) {
                        continue;
                    }
                    // Q' extends P' by b without touching a's output, so
                    // removing a from Q' leaves Q with P →b Q →a Q'
                    let ok = succ(net, &p1, tb).into_iter().any(|q1| {
                        let eb = q1
                            .events()
                            .keys()
                            .copied()
                            .find(|e| p1.event(*e).is_none())
                            .unwrap();
                        if q1.events()[&eb].preset.iter().any(|c| produced.contains(c)) {
                            return false;
                        }
                        let keep = q1.events().keys().copied().filter(|&e| e != ea).collect();
                        match q1.prefix_by_events(&keep) {
                            Ok(q) => q.check(net).is_ok() && p.is_prefix_of(&q) && q.is_prefix_of(&q1),
                            Err(_) => false,
                        }
                    });
                    run.outcome(Verdict::from_bool(ok), || {
                        format!(
                            "{} with a={} b={}",
                            show_process(p, net),
                            net.transition_name(ta),
                            net.transition_name(tb)
                        )
                    });
                }
            }
        }
    }
    run.finish("lemma-confl")
}

/// (a) two `a`-extensions of one process are `≡₁*`; (b) `P ≡₁* Q →a Q'`
/// gives `P →a P' ≡₁* Q'`.
pub fn check_swaptrans(a: &Analysis) -> [CheckReport; 2] {
    let net = a.net;
    let mut ra = LemmaRun {
        a,
        f: Findings::default(),
        instances: 0,
    };
    let mut rb = LemmaRun {
        a,
        f: Findings::default(),
        instances: 0,
    };
    for p in a.below(1) {
        for t in net.transitions() {
            let qs = succ(net, p, t);
            for q in qs.iter().skip(1) {
                let v = a.equivalent(&qs[0], q);
                ra.outcome(v, || {
                    format!("{} and {}", show_process(&qs[0], net), show_process(q, net))
                });
            }
        }
        let class = SwapClass::explore(p, a.budgets.swaps);
        if !class.is_complete() {
            rb.f.unknown = true;
        }
        for member in class.members() {
            for (t, q1) in member.process.concrete_successors(net) {
                let candidates = succ(net, p, t);
                let mut v = Verdict::Fails;
                for p1 in &candidates {
                    match a.equivalent(p1, &q1) {
                        Verdict::Holds => {
                            v = Verdict::Holds;
                            break;
                        }
                        Verdict::Unknown => v = Verdict::Unknown,
                        Verdict::Fails => {}
                    }
                }
                rb.outcome(v, || {
                    format!(
                        "{} ≡ {} --{}--> {}",
                        show_process(p, net),
                        show_process(&member.process, net),
                        net.transition_name(t),
                        show_process(&q1, net)
                    )
                });
            }
        }
    }
    [ra.finish("obs-swaptrans-a"), rb.finish("obs-swaptrans-b")]
}

/// On binary-conflict-free nets: `P →a P'`, `P →b Q`, `a ≠ b` give
/// `P̂ →{a,b}` and `P' →b Q'` with `Q →a ≡₁* Q'`.
pub fn check_cfdiamond(a: &Analysis) -> CheckReport {
    let net = a.net;
    let mut run = LemmaRun {
        a,
        f: Findings::default(),
        instances: 0,
    };
    if a.classification.binary_conflict_free.verdict != Verdict::Holds {
        run.f.note(format!(
            "skipped: binary_conflict_free={}",
            a.classification.binary_conflict_free.verdict
        ));
        return run.finish("lemma-cfdiamond");
    }
    for p in a.below(2) {
        let hat = p.final_marking();
        for ta in net.transitions() {
            for tb in net.transitions().filter(|&tb| tb != ta) {
                let (pas, pbs) = (succ(net, p, ta), succ(net, p, tb));
                if pas.is_empty() || pbs.is_empty() {
                    continue;
                }
                let g = [ta, tb].into_iter().collect();
                let step = net.enabled(&hat, &g).unwrap_or(false);
                for p1 in &pas {
                    for q in &pbs {
                        let mut v = Verdict::from_bool(step);
                        if step {
                            v = Verdict::Fails;
                            'search: for q1 in succ(net, p1, tb) {
                                for q2 in succ(net, q, ta) {
                                    match a.equivalent(&q2, &q1) {
                                        Verdict::Holds => {
                                            v = Verdict::Holds;
                                            break 'search;
                                        }
                                        Verdict::Unknown => v = Verdict::Unknown,
                                        Verdict::Fails => {}
                                    }
                                }
                            }
                        }
                        run.outcome(v, || {
                            format!(
                                "{} with a={} b={}",
                                show_process(p, net),
                                net.transition_name(ta),
                                net.transition_name(tb)
                            )
                        });
                    }
                }
            }
        }
    }
    run.finish("lemma-cfdiamond")
}

/// Every prefix of `p`, including `p`.
fn prefixes(p: &Process) -> Vec<Process> {
    (0..=p.event_count())
        .flat_map(|k| p.downward_closed_subsets(k))
        .map(|keep| p.prefix_by_events(&keep).expect("downward closed"))
        .collect()
}

/// Swap versus prefix: the observation (`P ∼s P' ≤ Q` gives
/// `P ≤ Q' ∼s Q`), the lemma (`P ≤ Q' ∼s Q` gives `P ≤ P' ∼s P'' ≤ Q` with
/// `P'` the least prefix of `Q'` containing `P` and both swapped
/// conditions) and the corollary (`P ≡₁* P' ≤ Q` gives `P ⊑ Q`).
pub fn check_swapprefix(a: &Analysis) -> [CheckReport; 3] {
    let net = a.net;
    let mut obs = LemmaRun {
        a,
        f: Findings::default(),
        instances: 0,
    };
    let mut lemma = LemmaRun {
        a,
        f: Findings::default(),
        instances: 0,
    };
    let mut cor = LemmaRun {
        a,
        f: Findings::default(),
        instances: 0,
    };
    for e in &a.unfolding.processes {
        let q = &e.process;
        let mut q_moves: Vec<Option<SwapMove>> = vec![None];
        q_moves.extend(effective_moves(q).into_iter().map(Some));
        let q_swaps: Vec<Process> = q_moves
            .iter()
            .map(|m| m.map_or_else(|| q.clone(), |m| swap(q, m).expect("legal")))
            .collect();
        let pre = prefixes(q);
        for p1 in &pre {
            for m in effective_moves(p1) {
                let p = swap(p1, m).expect("legal");
                let ok = q_swaps.iter().any(|q1| p.is_prefix_of(q1));
                obs.outcome(Verdict::from_bool(ok), || {
                    format!(
                        "{} swapped by {} inside {}",
                        show_process(p1, net),
                        show_moves(&[m]),
                        show_process(q, net)
                    )
                });
            }
        }
        // q plays Q'
        for m in effective_moves(q) {
            let target = swap(q, m).expect("legal");
            let producers: BTreeSet<_> = [m.p, m.q]
                .iter()
                .filter_map(|c| q.conditions()[c].producer)
                .collect();
            for p in &pre {
                let mut keep: BTreeSet<_> = p.events().keys().copied().collect();
                for &ev in &producers {
                    keep.insert(ev);
                    keep.extend(q.causal_past(ev));
                }
                let ok = q.prefix_by_events(&keep).ok().is_some_and(|p1| {
                    p.is_prefix_of(&p1)
                        && is_legal(&p1, m)
                        && swap(&p1, m).is_ok_and(|p2| p2.is_prefix_of(&target))
                });
                lemma.outcome(Verdict::from_bool(ok), || {
                    format!(
                        "{} ≤ {} with {}",
                        show_process(p, net),
                        show_process(q, net),
                        show_moves(&[m])
                    )
                });
            }
        }
        for p1 in q.immediate_prefixes() {
            let class = SwapClass::explore(&p1, a.budgets.swaps);
            if !class.is_complete() {
                cor.f.unknown = true;
            }
            for member in class.members() {
                let v = bd_preorder_fin(net, &member.process, q, a.budgets.swaps).verdict;
                cor.outcome(v, || {
                    format!(
                        "{} ⋢ {}",
                        show_process(&member.process, net),
                        show_process(q, net)
                    )
                });
            }
        }
    }
    [
        obs.finish("obs-swapprefix"),
        lemma.finish("lemma-swapprefix"),
        cor.finish("cor-swapprefix"),
    ]
}

/// All lemma and observation checks.
pub fn check_lemmas(a: &Analysis) -> Vec<CheckReport> {
    let mut out = vec![check_confl(a), check_cfdiamond(a)];
    out.extend(check_swaptrans(a));
    out.extend(check_swapprefix(a));
    out
}

/// Two process families of [`crate::corpus::fig6`], which has two tokens
/// on place 2: `all_a(d)` fires `a` `d` times, alternating between them;
/// `mixed(d)` fires `a` `d` times on one token and `b` `d` times on the
/// other.
pub mod fig6 {
    use crate::corpus;
    use crate::net::{Net, TransitionId};
    use crate::process::{CondId, Process};

    /// The end condition labelled `place` produced by the last event, or
    /// the initial one.
    fn output(p: &Process, net: &Net, consumed: CondId) -> CondId {
        let e = p.conditions()[&consumed].consumer.expect("consumed");
        let place = p.conditions()[&consumed].place;
        let ev = &p.events()[&e];
        *ev.postset
            .iter()
            .find(|c| p.conditions()[c].place == place)
            .unwrap_or_else(|| panic!("{} is a self-loop", net.transition_name(ev.transition)))
    }

    fn fire(p: &mut Process, net: &Net, t: TransitionId, consumed: [CondId; 2], tokens: [&mut CondId; 2]) {
        *p = p.extend(net, t, &consumed).expect("self-loop on end conditions");
        for (c, slot) in consumed.into_iter().zip(tokens) {
            *slot = output(p, net, c);
        }
    }

    fn initial(net: &Net) -> (Process, CondId, [CondId; 2], CondId) {
        let p = Process::initial(net);
        let by_place = |name: &str| -> Vec<CondId> {
            let place = net.place(name).expect("fig6 place");
            p.conditions()
                .iter()
                .filter(|(_, c)| c.place == place)
                .map(|(&id, _)| id)
                .collect()
        };
        let twos = by_place("2");
        (p.clone(), by_place("1")[0], [twos[0], twos[1]], by_place("3")[0])
    }

    pub fn all_a(d: usize) -> Process {
        let net = corpus::fig6();
        let a = net.transition("a").unwrap();
        let (mut p, mut one, mut two, _) = initial(&net);
        for i in 0..d {
            let (c1, c2) = (one, two[i % 2]);
            let [x, y] = &mut two;
            let slot = if i % 2 == 0 { x } else { y };
            fire(&mut p, &net, a, [c1, c2], [&mut one, slot]);
        }
        p
    }

    pub fn mixed(d: usize) -> Process {
        let net = corpus::fig6();
        let (a, b) = (net.transition("a").unwrap(), net.transition("b").unwrap());
        let (mut p, mut one, [mut x, mut y], mut three) = initial(&net);
        for _ in 0..d {
            let (c1, c2) = (one, x);
            fire(&mut p, &net, a, [c1, c2], [&mut one, &mut x]);
        }
        for _ in 0..d {
            let (c2, c3) = (y, three);
            fire(&mut p, &net, b, [c2, c3], [&mut y, &mut three]);
        }
        p
    }
}

/// `all_a(d) ⊑ mixed(d)` for every `d ≤ depth`, while `mixed(d)` is below
/// no `all_a(k)` once `d ≥ 1`: the all-`a` runs are `≤`-maximal in the
/// limit but not maximal for the BD-preorder.
pub fn check_fig6_maximality(depth: usize, budget: usize) -> CheckReport {
    let net = crate::corpus::fig6();
    let mut f = Findings::default();
    let mut witness = None;
    for d in 0..=depth {
        let (lo, hi) = (fig6::all_a(d), fig6::mixed(d));
        let up = bd_preorder_fin(&net, &lo, &hi, budget);
        match up.verdict {
            Verdict::Holds => {
                let (r, path) = up.witness.as_ref().expect("witness on holds");
                f.note(format!(
                    "d={d}: all_a ⊑ mixed (extension by {} events, {} swaps)",
                    r.event_count() - lo.event_count(),
                    path.len()
                ));
                if d == depth {
                    witness = Some(format!("{} ; {}", show_process(r, &net), show_moves(&path.moves)));
                }
            }
            Verdict::Fails => f.fail(format!("d={d}: all_a not below mixed")),
            Verdict::Unknown => f.unknown = true,
        }
        if d >= 1 {
            for k in 0..=depth {
                let down = bd_preorder_fin(&net, &hi, &fig6::all_a(k), budget).verdict;
                match down {
                    Verdict::Fails => {}
                    Verdict::Holds => f.fail(format!("d={d}: mixed ⊑ all_a({k})")),
                    Verdict::Unknown => f.unknown = true,
                }
            }
        }
    }
    if d_zero_differs() {
        f.fail("d=0: families differ");
    }
    let witness = f.failure.clone().or(witness);
    CheckReport {
        check_id: "fig6-maximality".to_string(),
        net: "fig6".to_string(),
        verdict: f.verdict(),
        detail: f.notes.join("; "),
        witness,
        budgets: Budgets {
            swaps: budget,
            ..Budgets::with_depth(depth)
        },
    }
}

fn d_zero_differs() -> bool {
    fig6::all_a(0) != fig6::mixed(0)
}

/// Every check for one net, sorted by check id.
pub fn check_net(
    name: &str,
    net: &Net,
    expected: Option<&Expectations>,
    budgets: Budgets,
) -> Vec<CheckReport> {
    let a = Analysis::new(name, net, budgets);
    let none = Expectations::default();
    let expected = expected.unwrap_or(&none);
    let mut out = vec![
        check_classification(&a, expected),
        check_unique_maximal(&a, expected),
        check_largest_bd(&a),
        check_bd_run(&a),
        check_bisim(&a),
    ];
    out.extend(check_lemmas(&a));
    if name == "fig6" {
        out.push(check_fig6_maximality(budgets.depth, budgets.swaps));
    }
    out.sort_by(|x, y| x.check_id.cmp(&y.check_id));
    out
}

/// The whole suite over the given corpus entries, in order.
pub fn run_suite(nets: &[CorpusNet], budgets: Budgets) -> BTreeMap<String, Vec<CheckReport>> {
    nets.iter()
        .map(|c| {
            (
                c.name.to_string(),
                check_net(c.name, &c.net, Some(&c.expected), budgets),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn fig6_families() {
        let net = corpus::fig6();
        for d in 0..4 {
            let a = fig6::all_a(d);
            let m = fig6::mixed(d);
            assert!(a.check(&net).is_ok());
            assert!(m.check(&net).is_ok());
            assert_eq!(a.event_count(), d);
            assert_eq!(m.event_count(), 2 * d);
            assert_eq!(a.final_marking(), *net.initial_marking());
        }
        // alternating: the third a consumes the output of the first
        let p = fig6::all_a(3);
        let evs: Vec<_> = p.events().keys().copied().collect();
        assert!(p.event_precedes(evs[0], evs[2]));
    }

    #[test]
    fn fig1_suite_holds() {
        let c = &corpus::corpus()[0];
        for r in check_net(c.name, &c.net, Some(&c.expected), Budgets::with_depth(3)) {
            assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        }
    }
}
