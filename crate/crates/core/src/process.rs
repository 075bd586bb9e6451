//! GR-processes: occurrence nets with unbranched conditions, labelled into an
//! underlying [`Net`].
//!
//! A [`Process`] stores the flow relation from the conditions' side: every
//! condition has at most one producing and at most one consuming event, so
//! the representation cannot express a branched condition at all. Events
//! mirror the same arcs as sorted pre- and postsets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::multiset::Multiset;
use crate::net::{Marking, Net, PlaceId, Step, TransitionId};

/// A condition (place occurrence) of a process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CondId(pub u32);

/// An event (transition occurrence) of a process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl fmt::Display for CondId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Condition {
    pub place: PlaceId,
    pub producer: Option<EventId>,
    pub consumer: Option<EventId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub transition: TransitionId,
    /// Consumed conditions, sorted.
    pub preset: Vec<CondId>,
    /// Produced conditions, sorted.
    pub postset: Vec<CondId>,
}

/// A violated clause of the process definition.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProcessViolation {
    #[error("`{0}` is declared more than once")]
    DuplicateId(String),
    #[error("`{0}` is not declared")]
    UnknownNode(String),
    #[error("label of `{0}` is not a node of the right kind in the net")]
    LabelClash(String),
    #[error("arc `{0}` -> `{1}` must connect a condition and an event")]
    IllegalArc(String, String),
    #[error("condition `{0}` has more than one producer or consumer")]
    BranchedCondition(String),
    #[error("flow is cyclic: {}", .0.join(" -> "))]
    Cyclic(Vec<String>),
    #[error("initial conditions do not map onto the initial marking")]
    InitialMismatch,
    #[error("pre- or postset of event `{0}` does not match its transition")]
    FlowMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid process: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidProcess(pub Vec<ProcessViolation>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProcessError {
    #[error("event set is not causally downward closed: {0} is kept but a cause is not")]
    NotDownwardClosed(EventId),
    #[error("unknown event {0}")]
    UnknownEvent(EventId),
    #[error("conditions do not match the preset of the transition")]
    PresetMismatch,
    #[error("condition {0} is not in the end of the process")]
    NotInEnd(CondId),
}

/// An unvalidated process, as read from a process file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProcessDescription {
    pub name: String,
    pub net: String,
    /// `(condition, place)`
    pub conditions: Vec<(String, String)>,
    /// `(event, transition)`
    pub events: Vec<(String, String)>,
    pub arcs: Vec<(String, String)>,
}

/// A finite GR-process.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Process {
    conditions: BTreeMap<CondId, Condition>,
    events: BTreeMap<EventId, Event>,
}

impl Process {
    /// The initial process: one condition per token of `M0`, no events.
    /// Conditions are numbered in place order.
    pub fn initial(net: &Net) -> Process {
        let mut p = Process::default();
        for (i, &place) in net.initial_marking().expanded().enumerate() {
            p.conditions.insert(
                CondId(i as u32),
                Condition {
                    place,
                    producer: None,
                    consumer: None,
                },
            );
        }
        p
    }

    /// Assembles a process from parts, rebuilding the event-side arc lists
    /// from the conditions. No semantic check is done; see [`Process::check`].
    pub fn from_parts(
        conditions: BTreeMap<CondId, Condition>,
        events: BTreeMap<EventId, TransitionId>,
    ) -> Process {
        let mut evs: BTreeMap<EventId, Event> = events
            .into_iter()
            .map(|(e, t)| {
                (
                    e,
                    Event {
                        transition: t,
                        preset: Vec::new(),
                        postset: Vec::new(),
                    },
                )
            })
            .collect();
        for (&c, cond) in &conditions {
            if let Some(e) = cond.producer.and_then(|e| evs.get_mut(&e)) {
                e.postset.push(c);
            }
            if let Some(e) = cond.consumer.and_then(|e| evs.get_mut(&e)) {
                e.preset.push(c);
            }
        }
        Process {
            conditions,
            events: evs,
        }
    }

    pub fn conditions(&self) -> &BTreeMap<CondId, Condition> {
        &self.conditions
    }

    pub fn events(&self) -> &BTreeMap<EventId, Event> {
        &self.events
    }

    pub fn condition(&self, c: CondId) -> Option<&Condition> {
        self.conditions.get(&c)
    }

    pub fn event(&self, e: EventId) -> Option<&Event> {
        self.events.get(&e)
    }

    pub fn condition_count(&self) -> usize {
        self.conditions.len()
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    /// No conditions and no events.
    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty() && self.events.is_empty()
    }

    pub fn initial_conditions(&self) -> impl Iterator<Item = CondId> + '_ {
        self.conditions
            .iter()
            .filter(|(_, c)| c.producer.is_none())
            .map(|(&id, _)| id)
    }

    /// `P°`: conditions without a consumer.
    pub fn end(&self) -> Vec<CondId> {
        self.conditions
            .iter()
            .filter(|(_, c)| c.consumer.is_none())
            .map(|(&id, _)| id)
            .collect()
    }

    /// `π(P°)`, the marking reached by the process.
    pub fn final_marking(&self) -> Marking {
        self.conditions
            .values()
            .filter(|c| c.consumer.is_none())
            .map(|c| c.place)
            .collect()
    }

    /// `π(M0)` of the process.
    pub fn initial_marking(&self) -> Marking {
        self.conditions
            .values()
            .filter(|c| c.producer.is_none())
            .map(|c| c.place)
            .collect()
    }

    /// The multiset of transitions occurring in the process.
    pub fn event_labels(&self) -> Step {
        self.events.values().map(|e| e.transition).collect()
    }

    pub fn next_condition_id(&self) -> CondId {
        CondId(self.conditions.keys().next_back().map_or(0, |c| c.0 + 1))
    }

    pub fn next_event_id(&self) -> EventId {
        EventId(self.events.keys().next_back().map_or(0, |e| e.0 + 1))
    }

    /// Events with no event after them.
    pub fn maximal_events(&self) -> Vec<EventId> {
        self.events
            .iter()
            .filter(|(_, ev)| ev.postset.iter().all(|c| self.conditions[c].consumer.is_none()))
            .map(|(&e, _)| e)
            .collect()
    }

    /// Events that directly precede `e`.
    fn direct_causes(&self, e: EventId) -> impl Iterator<Item = EventId> + '_ {
        self.events[&e]
            .preset
            .iter()
            .filter_map(move |c| self.conditions[c].producer)
    }

    /// `(e, f) ∈ F⁺` for events.
    pub fn event_precedes(&self, e: EventId, f: EventId) -> bool {
        if e == f {
            return false;
        }
        let mut stack = vec![f];
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            for y in self.direct_causes(x) {
                if y == e {
                    return true;
                }
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        false
    }

    /// `(p, q) ∈ F⁺ ∪ (F⁺)⁻¹` for conditions.
    pub fn causally_related(&self, p: CondId, q: CondId) -> bool {
        let before = |a: CondId, b: CondId| {
            let (Some(cons), Some(prod)) = (self.conditions[&a].consumer, self.conditions[&b].producer)
            else {
                return false;
            };
            cons == prod || self.event_precedes(cons, prod)
        };
        p != q && (before(p, q) || before(q, p))
    }

    /// All events `u` with `(u, e) ∈ F⁺`.
    pub fn causal_past(&self, e: EventId) -> BTreeSet<EventId> {
        let mut past = BTreeSet::new();
        let mut stack = vec![e];
        while let Some(x) = stack.pop() {
            for y in self.direct_causes(x) {
                if past.insert(y) {
                    stack.push(y);
                }
            }
        }
        past
    }

    /// Events in a topological order of the flow, or a cycle as witness.
    pub fn topological_events(&self) -> Result<Vec<EventId>, Vec<EventId>> {
        let mut indeg: BTreeMap<EventId, usize> = self.events.keys().map(|&e| (e, 0)).collect();
        let mut succs: BTreeMap<EventId, Vec<EventId>> = BTreeMap::new();
        for &e in self.events.keys() {
            for c in self.direct_causes(e).collect::<Vec<_>>() {
                if self.events.contains_key(&c) {
                    *indeg.get_mut(&e).unwrap() += 1;
                    succs.entry(c).or_default().push(e);
                }
            }
        }
        let mut ready: Vec<EventId> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&e, _)| e).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(self.events.len());
        while let Some(e) = ready.pop() {
            order.push(e);
            for &s in succs.get(&e).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indeg.get_mut(&s).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(s);
                }
            }
        }
        if order.len() == self.events.len() {
            return Ok(order);
        }
        // every remaining event has a remaining cause; walk back until a repeat
        let done: BTreeSet<EventId> = order.into_iter().collect();
        let start = *self.events.keys().find(|e| !done.contains(e)).unwrap();
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let next = self
                .direct_causes(cur)
                .find(|c| !done.contains(c) && self.events.contains_key(c))
                .expect("remaining events have remaining causes");
            if let Some(pos) = path.iter().position(|&x| x == next) {
                let mut cycle: Vec<EventId> = path[pos..].to_vec();
                cycle.reverse();
                return Err(cycle);
            }
            path.push(next);
            cur = next;
        }
    }

    /// Checks every clause of the process definition against `net`.
    pub fn check(&self, net: &Net) -> Result<(), InvalidProcess> {
        let mut v = Vec::new();
        for (&c, cond) in &self.conditions {
            if cond.place.0 as usize >= net.place_count() {
                v.push(ProcessViolation::LabelClash(c.to_string()));
            }
            for (e, post) in [(cond.producer, true), (cond.consumer, false)] {
                let Some(e) = e else { continue };
                let ok = self.events.get(&e).is_some_and(|ev| {
                    if post {
                        ev.postset.contains(&c)
                    } else {
                        ev.preset.contains(&c)
                    }
                });
                if !ok {
                    v.push(ProcessViolation::UnknownNode(e.to_string()));
                }
            }
        }
        for (&e, ev) in &self.events {
            if ev.transition.0 as usize >= net.transition_count() {
                v.push(ProcessViolation::LabelClash(e.to_string()));
                continue;
            }
            for (list, post) in [(&ev.preset, false), (&ev.postset, true)] {
                for c in list {
                    let ok = self.conditions.get(c).is_some_and(|cond| {
                        if post {
                            cond.producer == Some(e)
                        } else {
                            cond.consumer == Some(e)
                        }
                    });
                    if !ok {
                        v.push(ProcessViolation::BranchedCondition(c.to_string()));
                    }
                }
            }
        }
        if !v.is_empty() {
            return Err(InvalidProcess(v));
        }
        if let Err(cycle) = self.topological_events() {
            v.push(ProcessViolation::Cyclic(
                cycle.iter().map(|e| e.to_string()).collect(),
            ));
        }
        if &self.initial_marking() != net.initial_marking() {
            v.push(ProcessViolation::InitialMismatch);
        }
        for (&e, ev) in &self.events {
            let pre: Marking = ev.preset.iter().map(|c| self.conditions[c].place).collect();
            let post: Marking = ev.postset.iter().map(|c| self.conditions[c].place).collect();
            if &pre != net.pre(ev.transition) || &post != net.post(ev.transition) {
                v.push(ProcessViolation::FlowMismatch(e.to_string()));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(InvalidProcess(v))
        }
    }

    /// Appends one event labelled `t` consuming `consumed`, which must be
    /// distinct end conditions whose labels are exactly `•t`. Fresh node
    /// ids continue the existing numbering.
    pub fn extend(&self, net: &Net, t: TransitionId, consumed: &[CondId]) -> Result<Process, ProcessError> {
        let mut labels = Marking::new();
        for &c in consumed {
            let cond = self.conditions.get(&c).ok_or(ProcessError::NotInEnd(c))?;
            if cond.consumer.is_some() || consumed.iter().filter(|&&x| x == c).count() > 1 {
                return Err(ProcessError::NotInEnd(c));
            }
            labels.insert(cond.place, 1);
        }
        if &labels != net.pre(t) {
            return Err(ProcessError::PresetMismatch);
        }
        let mut next = self.clone();
        let e = self.next_event_id();
        let mut preset: Vec<CondId> = consumed.to_vec();
        preset.sort();
        for c in &preset {
            next.conditions.get_mut(c).unwrap().consumer = Some(e);
        }
        let first = self.next_condition_id().0;
        let mut postset = Vec::new();
        for (i, &place) in net.post(t).expanded().enumerate() {
            let c = CondId(first + i as u32);
            next.conditions.insert(
                c,
                Condition {
                    place,
                    producer: Some(e),
                    consumer: None,
                },
            );
            postset.push(c);
        }
        next.events.insert(
            e,
            Event {
                transition: t,
                preset,
                postset,
            },
        );
        Ok(next)
    }

    /// Every way of consuming `•t` from the end of the process, as sorted
    /// condition lists in lexicographic order.
    pub fn preset_choices(&self, net: &Net, t: TransitionId) -> Vec<Vec<CondId>> {
        let end = self.end();
        let mut choices: Vec<Vec<CondId>> = vec![Vec::new()];
        for (place, w) in net.pre(t).iter() {
            let candidates: Vec<CondId> = end
                .iter()
                .copied()
                .filter(|c| self.conditions[c].place == *place)
                .collect();
            let subsets = combinations(&candidates, w as usize);
            if subsets.is_empty() {
                return Vec::new();
            }
            choices = choices
                .iter()
                .flat_map(|prefix| {
                    subsets.iter().map(move |s| {
                        let mut v = prefix.clone();
                        v.extend_from_slice(s);
                        v
                    })
                })
                .collect();
        }
        for c in &mut choices {
            c.sort();
        }
        choices.sort();
        choices
    }

    /// All one-event extensions by transition `t`, without identifying
    /// isomorphic results.
    pub fn concrete_successors_by(&self, net: &Net, t: TransitionId) -> Vec<Process> {
        self.preset_choices(net, t)
            .into_iter()
            .map(|choice| self.extend(net, t, &choice).expect("choice matches the preset"))
            .collect()
    }

    /// All one-event extensions, without identifying isomorphic results.
    pub fn concrete_successors(&self, net: &Net) -> Vec<(TransitionId, Process)> {
        net.transitions()
            .flat_map(|t| {
                self.concrete_successors_by(net, t)
                    .into_iter()
                    .map(move |p| (t, p))
            })
            .collect()
    }

    /// One-event extensions up to isomorphism: the first concrete extension
    /// of each isomorphism class, in transition order.
    pub fn successors(&self, net: &Net) -> Vec<(TransitionId, Process)> {
        let mut seen = std::collections::HashSet::new();
        self.concrete_successors(net)
            .into_iter()
            .filter(|(_, p)| seen.insert(p.canonical_form()))
            .collect()
    }

    /// True iff some transition can extend the process.
    pub fn has_extension(&self, net: &Net) -> bool {
        let end = self.final_marking();
        let found = net.enabled_transitions(&end).next().is_some();
        found
    }

    /// `P ↾ keep`, the prefix generated by a causally downward-closed set of
    /// events. Condition and event ids are preserved.
    pub fn prefix_by_events(&self, keep: &BTreeSet<EventId>) -> Result<Process, ProcessError> {
        for &e in keep {
            if !self.events.contains_key(&e) {
                return Err(ProcessError::UnknownEvent(e));
            }
            if self.direct_causes(e).any(|c| !keep.contains(&c)) {
                return Err(ProcessError::NotDownwardClosed(e));
            }
        }
        let mut out = Process::default();
        for (&c, cond) in &self.conditions {
            if cond.producer.is_some_and(|e| !keep.contains(&e)) {
                continue;
            }
            let mut cond = cond.clone();
            if cond.consumer.is_some_and(|e| !keep.contains(&e)) {
                cond.consumer = None;
            }
            out.conditions.insert(c, cond);
        }
        for &e in keep {
            out.events.insert(e, self.events[&e].clone());
        }
        Ok(out)
    }

    /// Removes one maximal event.
    pub fn without_event(&self, e: EventId) -> Result<Process, ProcessError> {
        let keep: BTreeSet<EventId> = self.events.keys().copied().filter(|&x| x != e).collect();
        self.prefix_by_events(&keep)
    }

    /// `self ≤ big` under the identity embedding of node ids.
    pub fn is_prefix_of(&self, big: &Process) -> bool {
        for (e, ev) in &self.events {
            if big.events.get(e) != Some(ev) {
                return false;
            }
        }
        for (c, cond) in &self.conditions {
            let Some(bc) = big.conditions.get(c) else {
                return false;
            };
            if bc.place != cond.place || bc.producer != cond.producer {
                return false;
            }
            let expected_consumer = bc.consumer.filter(|e| self.events.contains_key(e));
            if cond.consumer != expected_consumer {
                return false;
            }
        }
        // equal initial conditions, and every condition produced by a kept
        // event is kept (checked through the postsets above)
        big.initial_conditions().all(|c| self.conditions.contains_key(&c))
    }

    /// Whether some prefix of `big` is isomorphic to `self`.
    pub fn is_prefix_up_to_iso(&self, big: &Process) -> bool {
        self.embedding_into(big).is_some()
    }

    /// A downward-closed event set of `big` whose prefix is isomorphic to
    /// `self`, if any.
    pub fn embedding_into(&self, big: &Process) -> Option<BTreeSet<EventId>> {
        let k = self.event_count();
        if k > big.event_count()
            || !self.event_labels().is_submultiset_of(&big.event_labels())
            || self.initial_marking() != big.initial_marking()
        {
            return None;
        }
        let target = self.canonical_form();
        big.downward_closed_subsets(k).into_iter().find(|keep| {
            big.prefix_by_events(keep)
                .map(|p| p.canonical_form() == target)
                .unwrap_or(false)
        })
    }

    /// All causally downward-closed event sets of size `k`, in ascending
    /// order.
    pub fn downward_closed_subsets(&self, k: usize) -> Vec<BTreeSet<EventId>> {
        let mut frontier: BTreeSet<BTreeSet<EventId>> = BTreeSet::new();
        frontier.insert(BTreeSet::new());
        for _ in 0..k {
            let mut next = BTreeSet::new();
            for set in &frontier {
                for &e in self.events.keys() {
                    if !set.contains(&e) && self.direct_causes(e).all(|c| set.contains(&c)) {
                        let mut s = set.clone();
                        s.insert(e);
                        next.insert(s);
                    }
                }
            }
            frontier = next;
        }
        frontier.into_iter().collect()
    }

    /// All prefixes with exactly one event fewer, one per maximal event.
    pub fn immediate_prefixes(&self) -> Vec<Process> {
        self.maximal_events()
            .into_iter()
            .map(|e| self.without_event(e).expect("maximal events can be removed"))
            .collect()
    }

    /// Applies a node renaming. Nodes missing from the maps keep their ids.
    pub fn rename(&self, conds: &BTreeMap<CondId, CondId>, events: &BTreeMap<EventId, EventId>) -> Process {
        let rc = |c: &CondId| *conds.get(c).unwrap_or(c);
        let re = |e: &EventId| *events.get(e).unwrap_or(e);
        let conditions = self
            .conditions
            .iter()
            .map(|(c, cond)| {
                (
                    rc(c),
                    Condition {
                        place: cond.place,
                        producer: cond.producer.as_ref().map(re),
                        consumer: cond.consumer.as_ref().map(re),
                    },
                )
            })
            .collect();
        let events = self.events.iter().map(|(e, ev)| (re(e), ev.transition)).collect();
        Process::from_parts(conditions, events)
    }

    /// Raw form with `c<n>` / `e<n>` names.
    pub fn describe(&self, net: &Net, name: &str) -> ProcessDescription {
        let mut d = ProcessDescription {
            name: name.to_string(),
            net: net.name().to_string(),
            ..Default::default()
        };
        for (c, cond) in &self.conditions {
            d.conditions
                .push((c.to_string(), net.place_name(cond.place).to_string()));
        }
        for (e, ev) in &self.events {
            d.events
                .push((e.to_string(), net.transition_name(ev.transition).to_string()));
        }
        for (e, ev) in &self.events {
            for c in &ev.preset {
                d.arcs.push((c.to_string(), e.to_string()));
            }
            for c in &ev.postset {
                d.arcs.push((e.to_string(), c.to_string()));
            }
        }
        d
    }

    /// One-line summary listing events as `e0:a`.
    pub fn summary(&self, net: &Net) -> String {
        let evs: Vec<String> = self
            .events
            .iter()
            .map(|(e, ev)| format!("{e}:{}", net.transition_name(ev.transition)))
            .collect();
        format!(
            "{} conditions, {} events [{}]",
            self.conditions.len(),
            self.events.len(),
            evs.join(" ")
        )
    }
}

fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..=items.len() - k {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, items[i].clone());
            out.push(rest);
        }
    }
    out
}

/// Maps a file-level name onto a numeric id: `c<n>` (or `e<n>`) keeps `n`,
/// anything else gets the next free number after all numeric names.
fn assign_ids(names: &[&str], prefix: char) -> HashMap<String, u32> {
    let mut out = HashMap::new();
    let mut taken = BTreeSet::new();
    for &n in names {
        if let Some(num) = n
            .strip_prefix(prefix)
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .filter(|d| d.len() == 1 || !d.starts_with('0'))
            .and_then(|d| d.parse::<u32>().ok())
        {
            if taken.insert(num) {
                out.insert(n.to_string(), num);
            }
        }
    }
    let mut fresh = taken.iter().next_back().map_or(0, |m| m + 1);
    for &n in names {
        if !out.contains_key(n) {
            out.insert(n.to_string(), fresh);
            fresh += 1;
        }
    }
    out
}

impl ProcessDescription {
    /// Resolves names against `net` and checks every process clause.
    pub fn validate(&self, net: &Net) -> Result<Process, InvalidProcess> {
        let mut v = Vec::new();
        let mut seen = BTreeSet::new();
        for n in self
            .conditions
            .iter()
            .map(|c| &c.0)
            .chain(self.events.iter().map(|e| &e.0))
        {
            if !seen.insert(n.as_str()) {
                v.push(ProcessViolation::DuplicateId(n.clone()));
            }
        }
        if !v.is_empty() {
            return Err(InvalidProcess(v));
        }
        let cond_names: Vec<&str> = self.conditions.iter().map(|c| c.0.as_str()).collect();
        let event_names: Vec<&str> = self.events.iter().map(|e| e.0.as_str()).collect();
        let cid = assign_ids(&cond_names, 'c');
        let eid = assign_ids(&event_names, 'e');

        let mut conditions = BTreeMap::new();
        for (name, place) in &self.conditions {
            match net.place(place) {
                Some(p) => {
                    conditions.insert(
                        CondId(cid[name]),
                        Condition {
                            place: p,
                            producer: None,
                            consumer: None,
                        },
                    );
                }
                None => v.push(ProcessViolation::LabelClash(name.clone())),
            }
        }
        let mut events = BTreeMap::new();
        for (name, trans) in &self.events {
            match net.transition(trans) {
                Some(t) => {
                    events.insert(EventId(eid[name]), t);
                }
                None => v.push(ProcessViolation::LabelClash(name.clone())),
            }
        }
        let cond_name_of: HashMap<CondId, &str> = cond_names.iter().map(|n| (CondId(cid[*n]), *n)).collect();
        for (src, dst) in &self.arcs {
            let (sc, se) = (cid.get(src), eid.get(src));
            let (dc, de) = (cid.get(dst), eid.get(dst));
            if sc.is_none() && se.is_none() {
                v.push(ProcessViolation::UnknownNode(src.clone()));
                continue;
            }
            if dc.is_none() && de.is_none() {
                v.push(ProcessViolation::UnknownNode(dst.clone()));
                continue;
            }
            let (c, e, consumes) = match (sc, se, dc, de) {
                (Some(&c), _, _, Some(&e)) => (CondId(c), EventId(e), true),
                (_, Some(&e), Some(&c), _) => (CondId(c), EventId(e), false),
                _ => {
                    v.push(ProcessViolation::IllegalArc(src.clone(), dst.clone()));
                    continue;
                }
            };
            let Some(cond) = conditions.get_mut(&c) else {
                continue;
            };
            let slot = if consumes {
                &mut cond.consumer
            } else {
                &mut cond.producer
            };
            match slot {
                Some(prev) if *prev != e => {
                    let n = cond_name_of[&c].to_string();
                    if !v.contains(&ProcessViolation::BranchedCondition(n.clone())) {
                        v.push(ProcessViolation::BranchedCondition(n));
                    }
                }
                _ => *slot = Some(e),
            }
        }
        if !v.is_empty() {
            return Err(InvalidProcess(v));
        }
        let p = Process::from_parts(conditions, events);
        let event_name_of: HashMap<EventId, &str> =
            event_names.iter().map(|n| (EventId(eid[*n]), *n)).collect();
        p.check(net).map_err(|InvalidProcess(vs)| {
            InvalidProcess(
                vs.into_iter()
                    .map(|x| rename_violation(x, &cond_name_of, &event_name_of))
                    .collect(),
            )
        })?;
        Ok(p)
    }
}

fn rename_violation(
    v: ProcessViolation,
    conds: &HashMap<CondId, &str>,
    events: &HashMap<EventId, &str>,
) -> ProcessViolation {
    let rename = |s: String| -> String {
        if let Some(n) = s.strip_prefix('e').and_then(|d| d.parse().ok()) {
            if let Some(name) = events.get(&EventId(n)) {
                return name.to_string();
            }
        }
        if let Some(n) = s.strip_prefix('c').and_then(|d| d.parse().ok()) {
            if let Some(name) = conds.get(&CondId(n)) {
                return name.to_string();
            }
        }
        s
    };
    match v {
        ProcessViolation::FlowMismatch(s) => ProcessViolation::FlowMismatch(rename(s)),
        ProcessViolation::Cyclic(p) => ProcessViolation::Cyclic(p.into_iter().map(rename).collect()),
        ProcessViolation::LabelClash(s) => ProcessViolation::LabelClash(rename(s)),
        ProcessViolation::BranchedCondition(s) => ProcessViolation::BranchedCondition(rename(s)),
        other => other,
    }
}

/// The multiset of places labelling a set of conditions.
pub fn labels_of(p: &Process, conds: &[CondId]) -> Multiset<PlaceId> {
    conds.iter().map(|c| p.conditions[c].place).collect()
}
