//! Conflict notions on reachable markings: semantic conflict,
//! (binary-)conflict-freeness, persistence, structural and reachable
//! structural conflicts, and structural conflict nets.
//!
//! Every universally quantified check runs over one bounded
//! [`MarkingGraph`]. A violation found at any explored marking is definite;
//! the absence of violations is only conclusive when the graph is complete,
//! otherwise the verdict is [`Verdict::Unknown`].

use std::collections::BTreeSet;

use serde::Serialize;

use crate::net::{FireError, Marking, Net, Step, TransitionId};
use crate::reach::MarkingGraph;
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    Semantic,
    Binary,
    PersistenceViolation,
    ReachableStructural,
    StepWithSharedPreplace,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::Semantic => "semantic",
            WitnessKind::Binary => "binary",
            WitnessKind::PersistenceViolation => "persistence-violation",
            WitnessKind::ReachableStructural => "reachable-structural",
            WitnessKind::StepWithSharedPreplace => "step-with-shared-preplace",
        }
    }
}

/// A reachable marking together with the multiset of transitions that
/// violates the property named by `kind`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictWitness {
    pub kind: WitnessKind,
    pub marking: Marking,
    pub multiset: Step,
    /// A firing sequence from the initial marking to `marking`.
    pub path: Vec<TransitionId>,
}

impl ConflictWitness {
    /// Re-checks the witness against the net from scratch.
    pub fn replays(&self, net: &Net) -> bool {
        match net.fire_sequence(net.initial_marking(), &self.path) {
            Ok(m) if m == self.marking => {}
            _ => return false,
        }
        let m = &self.marking;
        let g = &self.multiset;
        let support: Vec<TransitionId> = g.support().copied().collect();
        match self.kind {
            WitnessKind::Semantic => in_conflict(net, m, g).unwrap_or(false),
            WitnessKind::Binary => g.cardinality() == 2 && in_conflict(net, m, g).unwrap_or(false),
            WitnessKind::PersistenceViolation => {
                if support.len() != 2 || g.cardinality() != 2 {
                    return false;
                }
                let (t, u) = (support[0], support[1]);
                net.is_enabled(m, t)
                    && net.is_enabled(m, u)
                    && (net.fire_sequence(m, &[t, u]).is_err() || net.fire_sequence(m, &[u, t]).is_err())
            }
            WitnessKind::ReachableStructural => {
                support.len() == 2
                    && g.cardinality() == 2
                    && net.is_enabled(m, support[0])
                    && net.is_enabled(m, support[1])
                    && shares_preplace(net, support[0], support[1])
            }
            WitnessKind::StepWithSharedPreplace => {
                let shared = match support.as_slice() {
                    [t] => g.get(t) == 2,
                    [t, u] => g.cardinality() == 2 && shares_preplace(net, *t, *u),
                    _ => false,
                };
                shared && net.enabled(m, g).unwrap_or(false)
            }
        }
    }

    /// `kind: {transitions} at {marking}`, with net names.
    pub fn show(&self, net: &Net) -> String {
        format!(
            "{}: {} at {}",
            self.kind.as_str(),
            net.show_step(&self.multiset),
            net.show_marking(&self.marking)
        )
    }
}

/// `G` is in (semantic) conflict at `M`: every `G↾{t}` is enabled, `G` is
/// not. The restriction keeps the multiplicity of `t`.
pub fn in_conflict(net: &Net, m: &Marking, g: &Step) -> Result<bool, FireError> {
    if g.is_empty() {
        return Err(FireError::EmptyStep);
    }
    if net.enabled(m, g)? {
        return Ok(false);
    }
    for (&t, k) in g.iter() {
        if !net.enabled(m, &Step::singleton(t, k))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `•t ∩ •u ≠ ∅`.
pub fn shares_preplace(net: &Net, t: TransitionId, u: TransitionId) -> bool {
    !net.pre(t).intersection(net.pre(u)).is_empty()
}

/// `{{t,u} | t ≠ u, •t ∩ •u ≠ ∅}` as ordered pairs `t < u`.
pub fn structural_conflict_pairs(net: &Net) -> BTreeSet<(TransitionId, TransitionId)> {
    let ts: Vec<TransitionId> = net.transitions().collect();
    let mut out = BTreeSet::new();
    for (i, &t) in ts.iter().enumerate() {
        for &u in &ts[i + 1..] {
            if shares_preplace(net, t, u) {
                out.insert((t, u));
            }
        }
    }
    out
}

/// A least conflict at `m`: smallest cardinality, then least in the
/// multiset order.
///
/// Each `G↾{t}` is enabled iff `G(t)` is at most the enabling degree `K(t)`,
/// so candidates are the sub-multisets of `K`. A conflict exists iff `K`
/// itself is not enabled, since enabledness is downward closed.
pub fn minimal_conflict_at(net: &Net, m: &Marking) -> Option<Step> {
    let degrees: Vec<(TransitionId, u64)> = net
        .transitions()
        .map(|t| (t, net.enabling_degree(m, t)))
        .filter(|&(_, k)| k > 0)
        .collect();
    let full: Step = degrees.iter().copied().collect();
    if full.is_empty() || net.enabled(m, &full).unwrap_or(true) {
        return None;
    }
    for size in 2..=full.cardinality() {
        let mut found: Option<Step> = None;
        let mut current = Vec::new();
        sub_multisets(&degrees, size, &mut current, &mut |g| {
            if !net.enabled(m, g).unwrap_or(true) && found.as_ref().is_none_or(|f| g < f) {
                found = Some(g.clone());
            }
        });
        if found.is_some() {
            return found;
        }
    }
    unreachable!("the full multiset of enabling degrees is a conflict")
}

fn sub_multisets(
    bounds: &[(TransitionId, u64)],
    size: u64,
    current: &mut Vec<(TransitionId, u64)>,
    visit: &mut impl FnMut(&Step),
) {
    let Some((&(t, k), rest)) = bounds.split_first() else {
        if size == 0 {
            visit(&current.iter().copied().collect());
        }
        return;
    };
    let room: u64 = rest.iter().map(|&(_, k)| k).sum();
    for n in 0..=k.min(size) {
        if size - n > room {
            continue;
        }
        if n > 0 {
            current.push((t, n));
        }
        sub_multisets(rest, size - n, current, visit);
        if n > 0 {
            current.pop();
        }
    }
}

/// Outcome of a check over the marking graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    pub witness: Option<ConflictWitness>,
}

impl CheckOutcome {
    fn scan(
        graph: &MarkingGraph,
        kind: WitnessKind,
        mut at: impl FnMut(&Marking) -> Option<Step>,
    ) -> CheckOutcome {
        for (v, m) in graph.vertices().iter().enumerate() {
            if let Some(g) = at(m) {
                return CheckOutcome {
                    verdict: Verdict::Fails,
                    witness: Some(ConflictWitness {
                        kind,
                        marking: m.clone(),
                        multiset: g,
                        path: graph.path_to(v),
                    }),
                };
            }
        }
        CheckOutcome {
            verdict: if graph.is_complete() {
                Verdict::Holds
            } else {
                Verdict::Unknown
            },
            witness: None,
        }
    }
}

/// Pairs `t < u` of transitions both enabled at `m`.
fn enabled_pairs(net: &Net, m: &Marking) -> Vec<(TransitionId, TransitionId)> {
    let en: Vec<TransitionId> = net.enabled_transitions(m).collect();
    let mut out = Vec::new();
    for (i, &t) in en.iter().enumerate() {
        for &u in &en[i + 1..] {
            out.push((t, u));
        }
    }
    out
}

fn pair(t: TransitionId, u: TransitionId) -> Step {
    [t, u].into_iter().collect()
}

/// No reachable marking has a size-2 multiset in conflict.
pub fn binary_conflict_freeness(net: &Net, graph: &MarkingGraph) -> CheckOutcome {
    CheckOutcome::scan(graph, WitnessKind::Binary, |m| {
        enabled_pairs(net, m)
            .into_iter()
            .map(|(t, u)| pair(t, u))
            .find(|g| !net.enabled(m, g).unwrap_or(true))
    })
}

/// No reachable marking has any multiset in conflict. Witnesses are taken
/// at the first marking in BFS order that has one.
pub fn conflict_freeness(net: &Net, graph: &MarkingGraph) -> CheckOutcome {
    CheckOutcome::scan(graph, WitnessKind::Semantic, |m| minimal_conflict_at(net, m))
}

/// Firing one enabled transition never disables another.
pub fn persistence(net: &Net, graph: &MarkingGraph) -> CheckOutcome {
    CheckOutcome::scan(graph, WitnessKind::PersistenceViolation, |m| {
        enabled_pairs(net, m)
            .into_iter()
            .find(|&(t, u)| net.fire_sequence(m, &[t, u]).is_err() || net.fire_sequence(m, &[u, t]).is_err())
            .map(|(t, u)| pair(t, u))
    })
}

/// Some reachable marking enables two distinct transitions sharing a
/// preplace. Here a witness means `Holds`.
pub fn reachable_structural_conflict(net: &Net, graph: &MarkingGraph) -> CheckOutcome {
    let none = CheckOutcome::scan(graph, WitnessKind::ReachableStructural, |m| {
        enabled_pairs(net, m)
            .into_iter()
            .find(|&(t, u)| shares_preplace(net, t, u))
            .map(|(t, u)| pair(t, u))
    });
    CheckOutcome {
        verdict: match none.verdict {
            Verdict::Fails => Verdict::Holds,
            Verdict::Holds => Verdict::Fails,
            Verdict::Unknown => Verdict::Unknown,
        },
        witness: none.witness,
    }
}

/// No reachable marking enables a step `{t,u}` (possibly `t = u`) with
/// `•t ∩ •u ≠ ∅`.
pub fn structural_conflict_net(net: &Net, graph: &MarkingGraph) -> CheckOutcome {
    CheckOutcome::scan(graph, WitnessKind::StepWithSharedPreplace, |m| {
        let en: Vec<TransitionId> = net.enabled_transitions(m).collect();
        for (i, &t) in en.iter().enumerate() {
            for &u in &en[i..] {
                let g = pair(t, u);
                if (t == u || shares_preplace(net, t, u)) && net.enabled(m, &g).unwrap_or(false) {
                    return Some(g);
                }
            }
        }
        None
    })
}

pub fn is_binary_conflict_free(net: &Net, cap: usize) -> CheckOutcome {
    binary_conflict_freeness(net, &MarkingGraph::explore(net, cap))
}

pub fn is_conflict_free(net: &Net, cap: usize) -> CheckOutcome {
    conflict_freeness(net, &MarkingGraph::explore(net, cap))
}

pub fn is_persistent(net: &Net, cap: usize) -> CheckOutcome {
    persistence(net, &MarkingGraph::explore(net, cap))
}

pub fn has_reachable_structural_conflict(net: &Net, cap: usize) -> CheckOutcome {
    reachable_structural_conflict(net, &MarkingGraph::explore(net, cap))
}

pub fn is_structural_conflict_net(net: &Net, cap: usize) -> CheckOutcome {
    structural_conflict_net(net, &MarkingGraph::explore(net, cap))
}

/// Size of the explored marking graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Exploration {
    pub markings: usize,
    pub edges: usize,
    pub complete: bool,
    pub cap: usize,
}

impl Exploration {
    pub fn of(graph: &MarkingGraph) -> Self {
        Exploration {
            markings: graph.len(),
            edges: graph.edges().len(),
            complete: graph.is_complete(),
            cap: graph.cap(),
        }
    }
}

/// All conflict properties of a net, from one shared marking graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub binary_conflict_free: CheckOutcome,
    pub conflict_free: CheckOutcome,
    pub persistent: CheckOutcome,
    pub structural_conflict_net: CheckOutcome,
    pub has_reachable_structural_conflict: CheckOutcome,
    pub structural_conflict_pairs: BTreeSet<(TransitionId, TransitionId)>,
    pub exploration: Exploration,
}

impl Classification {
    /// `(name, outcome)` in a fixed order.
    pub fn outcomes(&self) -> [(&'static str, &CheckOutcome); 5] {
        [
            ("binary_conflict_free", &self.binary_conflict_free),
            ("conflict_free", &self.conflict_free),
            (
                "has_reachable_structural_conflict",
                &self.has_reachable_structural_conflict,
            ),
            ("persistent", &self.persistent),
            ("structural_conflict_net", &self.structural_conflict_net),
        ]
    }

    pub fn all_definite(&self) -> bool {
        self.outcomes().iter().all(|(_, o)| o.verdict.is_definite())
    }
}

pub fn classify(net: &Net, cap: usize) -> Classification {
    classify_graph(net, &MarkingGraph::explore(net, cap))
}

pub fn classify_graph(net: &Net, graph: &MarkingGraph) -> Classification {
    Classification {
        binary_conflict_free: binary_conflict_freeness(net, graph),
        conflict_free: conflict_freeness(net, graph),
        persistent: persistence(net, graph),
        structural_conflict_net: structural_conflict_net(net, graph),
        has_reachable_structural_conflict: reachable_structural_conflict(net, graph),
        structural_conflict_pairs: structural_conflict_pairs(net),
        exploration: Exploration::of(graph),
    }
}
