//! Property checks over enumerated processes. Each returns the number of
//! instances examined, or a description of the first counterexample.

use std::collections::BTreeMap;

use bdproc::conflict::classify_graph;
use bdproc::multiset::Multiset;
use bdproc::swapping::{
    self, bd_approximations, bd_preorder_fin, effective_moves, swap, swap_equiv, SwapClass,
};
use bdproc::{corpus, harness, CondId, EventId, MarkingGraph, Net, Process, Step, Unfolding, Verdict};
use rand::Rng;

use super::{random_net, rng};

pub type Outcome = Result<usize, String>;

const BUDGET: usize = 20_000;

/// A net together with its processes up to a depth.
pub struct Subject {
    pub name: String,
    pub net: Net,
    pub processes: Vec<Process>,
}

impl Subject {
    pub fn new(name: &str, net: Net, depth: usize) -> Subject {
        let u = Unfolding::explore(&net, depth, 5_000);
        Subject {
            name: name.to_string(),
            processes: u.processes.into_iter().map(|e| e.process).collect(),
            net,
        }
    }

    /// Processes with at most `k` events.
    pub fn upto(&self, k: usize) -> impl Iterator<Item = &Process> + '_ {
        self.processes.iter().filter(move |p| p.event_count() <= k)
    }

    fn show(&self, p: &Process) -> String {
        format!("{}: {}", self.name, harness::show_process(p, &self.net))
    }
}

/// The corpus nets, exhaustively to `depth`.
pub fn corpus_subjects(depth: usize) -> Vec<Subject> {
    let mut nets: Vec<(String, Net)> = corpus::corpus()
        .into_iter()
        .map(|c| (c.name.to_string(), c.net))
        .collect();
    nets.push(("choice".into(), corpus::choice()));
    nets.into_iter()
        .map(|(n, net)| Subject::new(&n, net, depth))
        .collect()
}

/// `count` random nets with 3 places and 3 transitions.
pub fn random_subjects(seed: u64, count: usize, depth: usize) -> Vec<Subject> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let name = format!("r{seed}-{i}");
            let net = random_net(&mut r, &name, 3, 3, i % 2 == 0);
            Subject::new(&name, net, depth)
        })
        .collect()
}

fn fail(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn multiset_laws(seed: u64, cases: usize) -> Outcome {
    let mut r = rng(seed);
    let gen = |r: &mut rand_chacha::ChaCha8Rng| -> Multiset<u8> {
        let mut m = Multiset::new();
        for _ in 0..r.gen_range(0..6) {
            m.insert(r.gen_range(0..4), r.gen_range(0..3));
        }
        m
    };
    for _ in 0..cases {
        let (a, b) = (gen(&mut r), gen(&mut r));
        let k = r.gen_range(0..3u64);
        let sum = a.checked_sum(&b).unwrap();
        let results = [
            a.union(&b),
            a.intersection(&b),
            sum.clone(),
            a.monus(&b),
            a.checked_scale(k).unwrap(),
            a.restrict(|x| *x < 2),
        ];
        for m in &results {
            fail(m.iter().all(|(_, k)| k > 0), || format!("zero entry in {m:?}"))?;
        }
        for x in 0..4u8 {
            let (ax, bx) = (a.get(&x), b.get(&x));
            let ok = results[0].get(&x) == ax.max(bx)
                && results[1].get(&x) == ax.min(bx)
                && results[2].get(&x) == ax + bx
                && results[3].get(&x) == ax.saturating_sub(bx)
                && results[4].get(&x) == k * ax
                && results[5].get(&x) == if x < 2 { ax } else { 0 };
            fail(ok, || format!("pointwise law at {x} for {a:?}, {b:?}"))?;
        }
        fail(sum.cardinality() == a.cardinality() + b.cardinality(), || {
            "cardinality".into()
        })?;
        let sub = (0..4u8).all(|x| a.get(&x) <= b.get(&x));
        fail(a.is_submultiset_of(&b) == sub, || "sub-multiset test".into())?;
        if b.is_submultiset_of(&a) {
            let back = a.monus(&b).checked_sum(&a.intersection(&b)).unwrap();
            fail(back.cardinality() == a.cardinality(), || {
                format!("monus law for {a:?}, {b:?}")
            })?;
        }
    }
    Ok(cases)
}

/// `M →{t,u}` implies `M →tu` and `M →ut`, both reaching the step's result.
pub fn step_serialization(subjects: &[Subject]) -> Outcome {
    let mut n = 0;
    for s in subjects {
        let g = MarkingGraph::explore(&s.net, 200);
        for m in g.vertices() {
            for t in s.net.transitions() {
                for u in s.net.transitions().filter(|&u| u != t) {
                    let step: Step = [t, u].into_iter().collect();
                    if s.net.enabled(m, &step) != Ok(true) {
                        continue;
                    }
                    n += 1;
                    let m2 = s.net.fire_step(m, &step).map_err(|e| e.to_string())?;
                    let tu = s.net.fire_sequence(m, &[t, u]).ok();
                    let ut = s.net.fire_sequence(m, &[u, t]).ok();
                    fail(tu.as_ref() == Some(&m2) && ut.as_ref() == Some(&m2), || {
                        format!(
                            "{}: step {} at {}",
                            s.name,
                            s.net.show_step(&step),
                            s.net.show_marking(m)
                        )
                    })?;
                }
            }
        }
    }
    Ok(n)
}

/// The four bisimulation clauses between processes and markings.
pub fn bisimulation(subjects: &[Subject], depth: usize) -> Outcome {
    let mut n = 0;
    for s in subjects {
        let net = &s.net;
        let init = Process::initial(net);
        fail(
            init.event_count() == 0 && init.final_marking() == *net.initial_marking(),
            || format!("{}: initial process", s.name),
        )?;
        let g = MarkingGraph::explore(net, 10_000);
        for p in &s.processes {
            n += 1;
            let m = p.final_marking();
            if g.is_complete() {
                fail(g.contains(&m), || format!("{} has unreachable end", s.show(p)))?;
            }
            if p.event_count() >= depth {
                continue;
            }
            let succ = p.concrete_successors(net);
            for &(a, ref q) in &succ {
                fail(net.fire(&m, a).as_ref() == Ok(&q.final_marking()), || {
                    format!("{} extended by {}", s.show(p), net.transition_name(a))
                })?;
            }
            for a in net.enabled_transitions(&m) {
                let target = net.fire(&m, a).unwrap();
                fail(
                    succ.iter().any(|(b, q)| *b == a && q.final_marking() == target),
                    || format!("{} cannot follow {}", s.show(p), net.transition_name(a)),
                )?;
            }
        }
    }
    Ok(n)
}

/// Every effective swap yields a valid process with the same end marking,
/// is undone by itself, and relates the two processes both ways.
pub fn swap_validity_and_symmetry(subjects: &[Subject]) -> Outcome {
    let mut n = 0;
    for s in subjects {
        for p in &s.processes {
            for m in effective_moves(p) {
                n += 1;
                let q = swap(p, m).map_err(|e| e.to_string())?;
                fail(q.check(&s.net).is_ok(), || {
                    format!("{} swap {m:?} invalid", s.show(p))
                })?;
                fail(q.final_marking() == p.final_marking(), || {
                    format!("{} end marking", s.show(p))
                })?;
                fail(swap(&q, m).is_ok_and(|b| b.isomorphic(p)), || {
                    format!("{} double swap", s.show(p))
                })?;
                fail(
                    swapping::one_step_equiv(p, &q) && swapping::one_step_equiv(&q, p),
                    || format!("{} one-step symmetry", s.show(p)),
                )?;
            }
        }
    }
    Ok(n)
}

/// Members of one swapping class share their end marking.
pub fn class_end_markings(subjects: &[Subject]) -> Outcome {
    let mut n = 0;
    for s in subjects {
        for p in &s.processes {
            let class = SwapClass::explore(p, BUDGET);
            for member in class.members() {
                n += 1;
                fail(member.process.final_marking() == p.final_marking(), || {
                    format!("{} class member differs", s.show(p))
                })?;
            }
        }
    }
    Ok(n)
}

fn shuffled_renaming(
    p: &Process,
    r: &mut impl Rng,
) -> (BTreeMap<CondId, CondId>, BTreeMap<EventId, EventId>) {
    use rand::seq::SliceRandom;
    let offset = 100;
    let mut cs: Vec<u32> = (0..p.condition_count() as u32).collect();
    let mut es: Vec<u32> = (0..p.event_count() as u32).collect();
    cs.shuffle(r);
    es.shuffle(r);
    let conds = p
        .conditions()
        .keys()
        .zip(cs)
        .map(|(&c, i)| (c, CondId(i + offset)))
        .collect();
    let events = p
        .events()
        .keys()
        .zip(es)
        .map(|(&e, i)| (e, EventId(i + offset)))
        .collect();
    (conds, events)
}

/// Swapping commutes with renaming: `swap(φP, φm) = φ(swap(P, m))`.
pub fn swapiso(subjects: &[Subject], seed: u64) -> Outcome {
    let mut r = rng(seed);
    let mut n = 0;
    for s in subjects {
        for p in &s.processes {
            let (conds, events) = shuffled_renaming(p, &mut r);
            let renamed = p.rename(&conds, &events);
            for m in effective_moves(p) {
                n += 1;
                let left = swap(&renamed, m.renamed(&conds)).map_err(|e| e.to_string())?;
                let right = swap(p, m).map_err(|e| e.to_string())?.rename(&conds, &events);
                fail(left == right && left.isomorphic(&swap(p, m).unwrap()), || {
                    format!("{} renamed swap", s.show(p))
                })?;
            }
        }
    }
    Ok(n)
}

/// Prefixes of a renamed copy are prefixes of the copy renamed back:
/// `P ≅ P' ≤ Q` gives `P ≤ Q' ≅ Q`.
pub fn isoprefix(subjects: &[Subject], seed: u64) -> Outcome {
    let mut r = rng(seed);
    let mut n = 0;
    for s in subjects {
        for q in &s.processes {
            let (conds, events) = shuffled_renaming(q, &mut r);
            for k in 0..=q.event_count() {
                for keep in q.downward_closed_subsets(k) {
                    n += 1;
                    let p1 = q.prefix_by_events(&keep).map_err(|e| e.to_string())?;
                    let p = p1.rename(&conds, &events);
                    let q1 = q.rename(&conds, &events);
                    fail(
                        p.is_prefix_of(&q1) && q1.isomorphic(q) && p.is_prefix_up_to_iso(q),
                        || format!("{} prefix {keep:?}", s.show(q)),
                    )?;
                }
            }
        }
    }
    Ok(n)
}

fn prefixes(q: &Process) -> Vec<Process> {
    (0..=q.event_count())
        .flat_map(|k| q.downward_closed_subsets(k))
        .map(|keep| q.prefix_by_events(&keep).unwrap())
        .collect()
}

/// `P ∼s P' ≤ Q` gives `P ≤ Q' ∼s Q`.
pub fn obs_swapprefix(subjects: &[Subject]) -> Outcome {
    let mut n = 0;
    for s in subjects {
        for q in &s.processes {
            for p1 in prefixes(q) {
                for m in effective_moves(&p1) {
                    n += 1;
                    let p = swap(&p1, m).unwrap();
                    let q1 = swap(q, m).map_err(|e| format!("{}: {e}", s.show(q)))?;
                    fail(p.is_prefix_of(&q1) && swap(&q1, m).is_ok_and(|b| b == *q), || {
                        format!("{} with prefix {}", s.show(q), s.show(&p1))
                    })?;
                }
            }
        }
    }
    Ok(n)
}

/// `P ≤ Q' ∼s Q` gives finite `P ≤ P' ∼s P'' ≤ Q`.
pub fn lemma_swapprefix(subjects: &[Subject]) -> Outcome {
    let mut n = 0;
    for s in subjects {
        for q1 in &s.processes {
            for m in effective_moves(q1) {
                let q = swap(q1, m).unwrap();
                for p in prefixes(q1) {
                    n += 1;
                    let found = prefixes(q1).into_iter().any(|p1| {
                        p.is_prefix_of(&p1)
                            && swapping::is_legal(&p1, m)
                            && swap(&p1, m).is_ok_and(|p2| p2.is_prefix_of(&q))
                    });
                    fail(found, || {
                        format!("{} under {m:?} with {}", s.show(q1), s.show(&p))
                    })?;
                }
            }
        }
    }
    Ok(n)
}

fn after(net: &Net, p: &Process, t: bdproc::TransitionId) -> Vec<Process> {
    p.concrete_successors_by(net, t)
}

/// `P →a P'` and `P̂ →{a,b}` give `P' →b Q'` and `P →b Q →a Q'`.
pub fn lemma_confl(subjects: &[Subject], depth: usize) -> Outcome {
    let mut n = 0;
    for s in subjects {
        let net = &s.net;
        for p in s.processes.iter().filter(|p| p.event_count() + 2 <= depth) {
            let m = p.final_marking();
            for (a, p1) in p.concrete_successors(net) {
                for b in net.transitions() {
                    let ab: Step = [a, b].into_iter().collect();
                    if net.enabled(&m, &ab) != Ok(true) {
                        continue;
                    }
                    n += 1;
                    let qs: Vec<Process> = after(net, &p1, b);
                    let found = after(net, p, b)
                        .iter()
                        .flat_map(|q| after(net, q, a))
                        .any(|q2| qs.iter().any(|q1| q1.isomorphic(&q2)));
                    fail(found, || {
                        format!(
                            "{} with {} then {}",
                            s.show(p),
                            net.transition_name(a),
                            net.transition_name(b)
                        )
                    })?;
                }
            }
        }
    }
    Ok(n)
}

/// On binary-conflict-free nets, `P →a P'` and `P →b Q` with `a ≠ b` give
/// `P̂ →{a,b}` and `P' →b Q'`, `Q →a ≡₁* Q'`.
pub fn lemma_cfdiamond(subjects: &[Subject], depth: usize) -> Outcome {
    let mut n = 0;
    for s in subjects {
        let net = &s.net;
        let c = classify_graph(net, &MarkingGraph::explore(net, 10_000));
        if c.binary_conflict_free.verdict != Verdict::Holds {
            continue;
        }
        for p in s.processes.iter().filter(|p| p.event_count() + 2 <= depth) {
            let succ = p.concrete_successors(net);
            for (a, p1) in &succ {
                for (b, q) in succ.iter().filter(|(b, _)| b != a) {
                    n += 1;
                    let ab: Step = [*a, *b].into_iter().collect();
                    fail(net.enabled(&p.final_marking(), &ab) == Ok(true), || {
                        format!("{} does not enable both", s.show(p))
                    })?;
                    let found = after(net, p1, *b).iter().any(|q1| {
                        after(net, q, *a)
                            .iter()
                            .any(|q2| swap_equiv(q2, q1, BUDGET).verdict == Verdict::Holds)
                    });
                    fail(found, || format!("{} diamond on {:?}", s.show(p), (a, b)))?;
                }
            }
        }
    }
    Ok(n)
}

/// Reflexivity and transitivity of the preorder, its kernel against
/// `swap_equiv`, and inclusion of approximation sets.
pub fn preorder_laws(subjects: &[Subject], k: usize) -> Outcome {
    let mut n = 0;
    for s in subjects {
        let net = &s.net;
        let ps: Vec<&Process> = s.upto(k).collect();
        let mut below = vec![vec![false; ps.len()]; ps.len()];
        for (i, p) in ps.iter().enumerate() {
            for (j, q) in ps.iter().enumerate() {
                let v = bd_preorder_fin(net, p, q, BUDGET).verdict;
                fail(v.is_definite(), || {
                    format!("{} vs {} undecided", s.show(p), s.show(q))
                })?;
                below[i][j] = v == Verdict::Holds;
                if i == j {
                    n += 1;
                    fail(below[i][i], || format!("{} not reflexive", s.show(p)))?;
                }
            }
        }
        let approx: Vec<_> = ps.iter().map(|p| bd_approximations(p, k, BUDGET)).collect();
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                n += 1;
                let equiv = swap_equiv(ps[i], ps[j], BUDGET).verdict == Verdict::Holds;
                fail((below[i][j] && below[j][i]) == equiv, || {
                    format!("kernel: {} vs {}", s.show(ps[i]), s.show(ps[j]))
                })?;
                if approx[i].complete && approx[j].complete {
                    let inc = approx[i].forms.is_subset(&approx[j].forms);
                    fail(inc == below[i][j], || {
                        format!("approximations: {} vs {}", s.show(ps[i]), s.show(ps[j]))
                    })?;
                }
                if !below[i][j] {
                    continue;
                }
                for l in 0..ps.len() {
                    if below[j][l] {
                        n += 1;
                        fail(below[i][l], || {
                            format!(
                                "transitivity: {} ⊑ {} ⊑ {}",
                                s.show(ps[i]),
                                s.show(ps[j]),
                                s.show(ps[l])
                            )
                        })?;
                    }
                }
            }
        }
    }
    Ok(n)
}
