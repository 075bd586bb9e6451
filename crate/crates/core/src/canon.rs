//! Canonical forms of processes.
//!
//! Two processes of the same net are isomorphic (by a bijection respecting
//! the labelling, the flow and the initial conditions) iff their canonical
//! forms are equal. The form is computed by individualisation and
//! refinement: colours start from `(node kind, label)` and are refined by
//! the sorted colours of predecessors and successors until stable; the
//! first non-singleton cell is then split on each of its members in turn,
//! and the lexicographically least encoding over all discrete colourings
//! is kept. Conditions that are interchangeable twins (same place, same
//! producer, same consumer) are split on only once.

use std::collections::BTreeMap;
use std::fmt;

use crate::process::{CondId, EventId, Process};

/// Label-respecting canonical encoding of a finite process.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(Vec<u32>);

impl CanonicalForm {
    pub fn words(&self) -> &[u32] {
        &self.0
    }

    /// Little-endian byte encoding of the words.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|w| w.to_le_bytes()).collect()
    }

    pub fn condition_count(&self) -> usize {
        self.0.first().copied().unwrap_or(0) as usize
    }

    pub fn event_count(&self) -> usize {
        self.0.get(1).copied().unwrap_or(0) as usize
    }

    /// Short hexadecimal digest (FNV-1a) for display purposes.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.digest())
    }
}

/// A canonical ordering of a process's nodes together with its encoding.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub form: CanonicalForm,
    /// Conditions in canonical order.
    pub conditions: Vec<CondId>,
    /// Events in canonical order.
    pub events: Vec<EventId>,
}

/// A label-respecting bijection between two processes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub conditions: BTreeMap<CondId, CondId>,
    pub events: BTreeMap<EventId, EventId>,
}

struct Dense {
    nc: usize,
    conds: Vec<CondId>,
    events: Vec<EventId>,
    label: Vec<u32>,
    ins: Vec<Vec<usize>>,
    outs: Vec<Vec<usize>>,
    /// For conditions: the representative of its twin class.
    twin: Vec<usize>,
}

impl Dense {
    fn new(p: &Process) -> Dense {
        let conds: Vec<CondId> = p.conditions().keys().copied().collect();
        let events: Vec<EventId> = p.events().keys().copied().collect();
        let nc = conds.len();
        let n = nc + events.len();
        let epos: BTreeMap<EventId, usize> = events.iter().enumerate().map(|(i, &e)| (e, nc + i)).collect();
        let mut label = vec![0; n];
        let mut ins = vec![Vec::new(); n];
        let mut outs = vec![Vec::new(); n];
        for (i, c) in conds.iter().enumerate() {
            let cond = &p.conditions()[c];
            label[i] = cond.place.0;
            if let Some(e) = cond.producer {
                ins[i].push(epos[&e]);
                outs[epos[&e]].push(i);
            }
            if let Some(e) = cond.consumer {
                outs[i].push(epos[&e]);
                ins[epos[&e]].push(i);
            }
        }
        for (j, e) in events.iter().enumerate() {
            label[nc + j] = p.events()[e].transition.0;
        }
        let mut twin: Vec<usize> = (0..n).collect();
        let mut reps: BTreeMap<(u32, Option<EventId>, Option<EventId>), usize> = BTreeMap::new();
        for (i, c) in conds.iter().enumerate() {
            let cond = &p.conditions()[c];
            twin[i] = *reps
                .entry((cond.place.0, cond.producer, cond.consumer))
                .or_insert(i);
        }
        Dense {
            nc,
            conds,
            events,
            label,
            ins,
            outs,
            twin,
        }
    }

    fn n(&self) -> usize {
        self.label.len()
    }

    fn initial_colors(&self) -> Vec<u32> {
        let keys: Vec<(u8, u32)> = (0..self.n())
            .map(|v| ((v >= self.nc) as u8, self.label[v]))
            .collect();
        rank(&keys)
    }

    fn refine(&self, colors: &mut Vec<u32>) {
        let mut count = distinct(colors);
        loop {
            let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..self.n())
                .map(|v| {
                    let mut i: Vec<u32> = self.ins[v].iter().map(|&u| colors[u]).collect();
                    let mut o: Vec<u32> = self.outs[v].iter().map(|&u| colors[u]).collect();
                    i.sort_unstable();
                    o.sort_unstable();
                    (colors[v], i, o)
                })
                .collect();
            let next = rank(&sigs);
            let c = distinct(&next);
            *colors = next;
            if c == count {
                break;
            }
            count = c;
        }
    }

    fn encode(&self, colors: &[u32]) -> (Vec<u32>, Vec<usize>) {
        let n = self.n();
        let mut order = vec![0usize; n];
        for v in 0..n {
            order[colors[v] as usize] = v;
        }
        let nc = self.nc;
        let mut words = Vec::with_capacity(2 + 3 * nc + (n - nc));
        words.push(nc as u32);
        words.push((n - nc) as u32);
        let ev_rank = |e: usize| colors[e] - nc as u32 + 1;
        for &v in &order[..nc] {
            words.push(self.label[v]);
            words.push(self.ins[v].first().map_or(0, |&e| ev_rank(e)));
            words.push(self.outs[v].first().map_or(0, |&e| ev_rank(e)));
        }
        for &v in &order[nc..] {
            words.push(self.label[v]);
        }
        (words, order)
    }

    fn search(&self, mut colors: Vec<u32>, best: &mut Option<(Vec<u32>, Vec<usize>)>) {
        self.refine(&mut colors);
        let n = self.n();
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| sizes[c] > 1) else {
            let leaf = self.encode(&colors);
            if best.as_ref().is_none_or(|b| leaf.0 < b.0) {
                *best = Some(leaf);
            }
            return;
        };
        let target = target as u32;
        let mut tried_twins = Vec::new();
        for v in 0..n {
            if colors[v] != target {
                continue;
            }
            if tried_twins.contains(&self.twin[v]) {
                continue;
            }
            tried_twins.push(self.twin[v]);
            let keys: Vec<(u32, u8)> = (0..n)
                .map(|u| (colors[u], (colors[u] == target && u != v) as u8))
                .collect();
            self.search(rank(&keys), best);
        }
    }
}

fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut uniq: Vec<K> = keys.to_vec();
    uniq.sort();
    uniq.dedup();
    keys.iter()
        .map(|k| uniq.binary_search(k).unwrap() as u32)
        .collect()
}

fn distinct(colors: &[u32]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

impl Process {
    /// Canonical node ordering and encoding.
    pub fn canonical_labeling(&self) -> Labeling {
        let g = Dense::new(self);
        let mut best = None;
        g.search(g.initial_colors(), &mut best);
        let (words, order) = best.unwrap_or_else(|| (vec![0, 0], Vec::new()));
        Labeling {
            form: CanonicalForm(words),
            conditions: order[..g.nc].iter().map(|&v| g.conds[v]).collect(),
            events: order[g.nc..].iter().map(|&v| g.events[v - g.nc]).collect(),
        }
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.canonical_labeling().form
    }

    /// The isomorphic copy whose conditions are `c0, c1, ...` and events
    /// `e0, e1, ...` in canonical order.
    pub fn canonical_representative(&self) -> Process {
        let l = self.canonical_labeling();
        let conds = l
            .conditions
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, CondId(i as u32)))
            .collect();
        let events = l
            .events
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, EventId(i as u32)))
            .collect();
        self.rename(&conds, &events)
    }

    pub fn isomorphic(&self, other: &Process) -> bool {
        self.event_count() == other.event_count()
            && self.condition_count() == other.condition_count()
            && self.canonical_form() == other.canonical_form()
    }

    /// A bijection `φ` from `self` onto `other` with `π' ∘ φ = π`, if the
    /// two are isomorphic.
    pub fn isomorphism(&self, other: &Process) -> Option<Isomorphism> {
        let a = self.canonical_labeling();
        let b = other.canonical_labeling();
        if a.form != b.form {
            return None;
        }
        Some(Isomorphism {
            conditions: a.conditions.into_iter().zip(b.conditions).collect(),
            events: a.events.into_iter().zip(b.events).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn renamed_copy_is_isomorphic() {
        let net = corpus::fig1();
        let p = Process::initial(&net);
        let a = net.transition("a").unwrap();
        let q = p.concrete_successors_by(&net, a).remove(0);
        let conds: BTreeMap<_, _> = q.conditions().keys().map(|&c| (c, CondId(100 - c.0))).collect();
        let events: BTreeMap<_, _> = q.events().keys().map(|&e| (e, EventId(7 + e.0))).collect();
        let r = q.rename(&conds, &events);
        assert_ne!(q, r);
        assert!(q.isomorphic(&r));
        let iso = q.isomorphism(&r).unwrap();
        assert_eq!(q.rename(&iso.conditions, &iso.events), r);
    }

    #[test]
    fn twins_do_not_blow_up() {
        let net = crate::net::NetDescription::new("many")
            .place("p", 12)
            .place("q", 0)
            .transition("t")
            .arc("p", "t", 1)
            .arc("t", "q", 1)
            .validate()
            .unwrap();
        let p = Process::initial(&net);
        assert_eq!(p.canonical_form().condition_count(), 12);
        let q = p.successors(&net);
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn representative_is_a_fixpoint() {
        let net = corpus::fig2();
        let mut frontier = vec![Process::initial(&net)];
        for _ in 0..3 {
            frontier = frontier
                .iter()
                .flat_map(|p| p.concrete_successors(&net))
                .map(|(_, p)| p)
                .collect();
        }
        for p in frontier {
            let r = p.canonical_representative();
            assert_eq!(r.canonical_representative(), r);
            assert_eq!(r.canonical_form(), p.canonical_form());
            r.check(&net).unwrap();
        }
    }
}
