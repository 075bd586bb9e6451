//! Brute-force oracles and random net generators shared by the integration
//! tests. Nothing here calls the library's own firing, exploration or
//! canonicalisation code: nets are read back from their descriptions.

#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use bdproc::{Net, NetDescription, Process};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A net as dense pre/post vectors, indexed in description order.
#[derive(Debug, Clone)]
pub struct Plain {
    pub places: Vec<String>,
    pub transitions: Vec<String>,
    pub pre: Vec<Vec<u64>>,
    pub post: Vec<Vec<u64>>,
    pub m0: Vec<u64>,
}

impl Plain {
    pub fn of(net: &Net) -> Plain {
        let d = net.describe();
        let places: Vec<String> = d.places.iter().map(|(n, _)| n.clone()).collect();
        let transitions = d.transitions.clone();
        let pi = |n: &str| places.iter().position(|p| p == n);
        let ti = |n: &str| transitions.iter().position(|t| t == n);
        let mut pre = vec![vec![0; places.len()]; transitions.len()];
        let mut post = pre.clone();
        for (s, t, w) in &d.arcs {
            match (pi(s), ti(t)) {
                (Some(p), Some(t)) => pre[t][p] += w,
                _ => post[ti(s).unwrap()][pi(t).unwrap()] += w,
            }
        }
        Plain {
            m0: d.places.iter().map(|(_, k)| *k).collect(),
            places,
            transitions,
            pre,
            post,
        }
    }

    pub fn enabled(&self, m: &[u64], t: usize) -> bool {
        self.pre[t].iter().zip(m).all(|(w, k)| w <= k)
    }

    pub fn fire(&self, m: &[u64], t: usize) -> Option<Vec<u64>> {
        self.enabled(m, t).then(|| {
            (0..m.len())
                .map(|p| m[p] - self.pre[t][p] + self.post[t][p])
                .collect()
        })
    }

    /// Enabledness of a step given as a count per transition.
    pub fn step_enabled(&self, m: &[u64], step: &[u64]) -> bool {
        (0..m.len()).all(|p| {
            let need: u64 = step.iter().enumerate().map(|(t, k)| k * self.pre[t][p]).sum();
            need <= m[p]
        })
    }

    /// All reachable markings by depth-first search over firing sequences,
    /// or `None` when more than `limit` are found.
    pub fn markings(&self, limit: usize) -> Option<BTreeSet<Vec<u64>>> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.m0.clone()];
        while let Some(m) = stack.pop() {
            if !seen.insert(m.clone()) {
                continue;
            }
            if seen.len() > limit {
                return None;
            }
            for t in 0..self.transitions.len() {
                if let Some(m2) = self.fire(&m, t) {
                    stack.push(m2);
                }
            }
        }
        Some(seen)
    }

    /// Marking by place names, with multiplicity.
    pub fn named(&self, m: &[u64]) -> Vec<String> {
        let mut out = Vec::new();
        for (p, &k) in m.iter().enumerate() {
            for _ in 0..k {
                out.push(self.places[p].clone());
            }
        }
        out
    }
}

/// A process as a list of events and conditions: each condition is
/// `(producer, place, consumer)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub labels: Vec<usize>,
    pub conds: Vec<(Option<usize>, usize, Option<usize>)>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for i in 0..n {
            let mut v = rest.clone();
            v.insert(i, n - 1);
            out.push(v);
        }
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = combinations(&items[1..], k - 1);
    for c in &mut out {
        c.insert(0, items[0]);
    }
    out.extend(combinations(&items[1..], k));
    out
}

impl Run {
    pub fn initial(net: &Plain) -> Run {
        let mut conds = Vec::new();
        for (p, &k) in net.m0.iter().enumerate() {
            for _ in 0..k {
                conds.push((None, p, None));
            }
        }
        Run {
            labels: vec![],
            conds,
        }
    }

    pub fn of_process(p: &Process, net: &Net, plain: &Plain) -> Run {
        let ev: BTreeMap<_, _> = p.events().keys().enumerate().map(|(i, &e)| (e, i)).collect();
        let labels = p
            .events()
            .values()
            .map(|e| {
                let name = net.transition_name(e.transition);
                plain.transitions.iter().position(|t| t == name).unwrap()
            })
            .collect();
        let conds = p
            .conditions()
            .values()
            .map(|c| {
                let name = net.place_name(c.place);
                (
                    c.producer.map(|e| ev[&e]),
                    plain.places.iter().position(|q| q == name).unwrap(),
                    c.consumer.map(|e| ev[&e]),
                )
            })
            .collect();
        Run { labels, conds }
    }

    pub fn end_marking(&self, net: &Plain) -> Vec<u64> {
        let mut m = vec![0; net.places.len()];
        for &(_, p, c) in &self.conds {
            if c.is_none() {
                m[p] += 1;
            }
        }
        m
    }

    /// One-event extensions, one per transition and choice of consumed
    /// end conditions.
    pub fn extensions(&self, net: &Plain) -> Vec<Run> {
        let mut out = Vec::new();
        for t in 0..net.transitions.len() {
            let mut choices: Vec<Vec<usize>> = vec![vec![]];
            for p in 0..net.places.len() {
                let w = net.pre[t][p] as usize;
                if w == 0 {
                    continue;
                }
                let free: Vec<usize> = (0..self.conds.len())
                    .filter(|&i| self.conds[i].1 == p && self.conds[i].2.is_none())
                    .collect();
                let combos = combinations(&free, w);
                choices = choices
                    .iter()
                    .flat_map(|c| {
                        combos.iter().map(move |k| {
                            let mut c = c.clone();
                            c.extend(k);
                            c
                        })
                    })
                    .collect();
            }
            for chosen in choices {
                let mut r = self.clone();
                let e = r.labels.len();
                r.labels.push(t);
                for i in chosen {
                    r.conds[i].2 = Some(e);
                }
                for p in 0..net.places.len() {
                    for _ in 0..net.post[t][p] {
                        r.conds.push((Some(e), p, None));
                    }
                }
                out.push(r);
            }
        }
        out
    }

    /// Isomorphism invariant: least encoding over all event orders.
    /// Conditions are determined by their (producer, place, consumer)
    /// triple up to swapping identical triples, so this is complete.
    pub fn key(&self) -> Vec<i64> {
        let enc = |s: &[usize], e: Option<usize>| e.map_or(-1, |e| s[e] as i64);
        permutations(self.labels.len())
            .into_iter()
            .map(|s| {
                let mut labels = vec![0i64; s.len()];
                for (i, &l) in self.labels.iter().enumerate() {
                    labels[s[i]] = l as i64;
                }
                let mut triples: Vec<[i64; 3]> = self
                    .conds
                    .iter()
                    .map(|&(a, p, b)| [enc(&s, a), p as i64, enc(&s, b)])
                    .collect();
                triples.sort();
                labels.extend(triples.into_iter().flatten());
                labels
            })
            .min()
            .unwrap()
    }
}

/// Every process with at most `depth` events, keyed by [`Run::key`].
pub fn all_runs(net: &Plain, depth: usize) -> BTreeMap<Vec<i64>, Run> {
    let init = Run::initial(net);
    let mut out = BTreeMap::new();
    out.insert(init.key(), init.clone());
    let mut queue = VecDeque::from([init]);
    while let Some(r) = queue.pop_front() {
        if r.labels.len() == depth {
            continue;
        }
        for x in r.extensions(net) {
            if let std::collections::btree_map::Entry::Vacant(slot) = out.entry(x.key()) {
                slot.insert(x.clone());
                queue.push_back(x);
            }
        }
    }
    out
}

/// True iff no transition is enabled at the end of `r`.
pub fn is_maximal(r: &Run, net: &Plain) -> bool {
    let m = r.end_marking(net);
    (0..net.transitions.len()).all(|t| !net.enabled(&m, t))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random net with `places` places and `transitions` transitions.
///
/// With `layered`, every transition only produces into places numbered
/// above all of its preplaces, so every run terminates.
pub fn random_net(rng: &mut impl Rng, name: &str, places: usize, transitions: usize, layered: bool) -> Net {
    let mut d = NetDescription::new(name);
    for p in 0..places {
        let tokens = if layered && p >= places / 2 {
            0
        } else {
            rng.gen_range(0..=2)
        };
        d = d.place(format!("s{p}"), tokens);
    }
    let ids: Vec<usize> = (0..places).collect();
    for t in 0..transitions {
        let name = format!("t{t}");
        d = d.transition(name.clone());
        let n_pre = rng.gen_range(1..=2.min(places));
        let pre: Vec<usize> = ids.choose_multiple(rng, n_pre).copied().collect();
        let top = *pre.iter().max().unwrap();
        for &p in &pre {
            let w = if !layered && rng.gen_bool(0.15) { 2 } else { 1 };
            d = d.arc(format!("s{p}"), name.clone(), w);
        }
        let targets: Vec<usize> = if layered {
            (top + 1..places).collect()
        } else {
            ids.clone()
        };
        let n_post = rng.gen_range(0..=2.min(targets.len()));
        for &p in targets.choose_multiple(rng, n_post) {
            d = d.arc(name.clone(), format!("s{p}"), 1);
        }
    }
    d.validate().expect("generated nets are well formed")
}
