//! The swapping transformation and the relations it induces on finite
//! processes: one-step swapping equivalence `≡₁`, its reflexive-transitive
//! closure `≡₁*`, the BD-preorder, finite BD-approximations and the search
//! for common extensions.
//!
//! All searches are bounded by a budget on the number of canonical forms
//! they may store; running out of budget yields [`Verdict::Unknown`].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::canon::CanonicalForm;
use crate::net::Net;
use crate::process::{CondId, Condition, EventId, Process};
use crate::verdict::Verdict;

/// Exchange of the outgoing arcs of two conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwapMove {
    pub p: CondId,
    pub q: CondId,
}

impl SwapMove {
    pub fn new(p: CondId, q: CondId) -> Self {
        SwapMove { p, q }
    }

    /// The same move with both conditions renamed.
    pub fn renamed(self, map: &BTreeMap<CondId, CondId>) -> Self {
        SwapMove {
            p: *map.get(&self.p).unwrap_or(&self.p),
            q: *map.get(&self.q).unwrap_or(&self.q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SwapError {
    #[error("unknown condition {0}")]
    UnknownCondition(CondId),
    #[error("conditions {0} and {1} are causally ordered")]
    CausallyOrdered(CondId, CondId),
    #[error("conditions {0} and {1} carry different labels")]
    LabelMismatch(CondId, CondId),
}

/// `swap(P, p, q)`: `p` takes over the consumer of `q` and vice versa.
/// Events, labels and initial conditions are unchanged.
pub fn swap(process: &Process, m: SwapMove) -> Result<Process, SwapError> {
    let cp = process.condition(m.p).ok_or(SwapError::UnknownCondition(m.p))?;
    let cq = process.condition(m.q).ok_or(SwapError::UnknownCondition(m.q))?;
    if cp.place != cq.place {
        return Err(SwapError::LabelMismatch(m.p, m.q));
    }
    if process.causally_related(m.p, m.q) {
        return Err(SwapError::CausallyOrdered(m.p, m.q));
    }
    if m.p == m.q || cp.consumer == cq.consumer {
        return Ok(process.clone());
    }
    let mut conditions: BTreeMap<CondId, Condition> = process.conditions().clone();
    let (a, b) = (cp.consumer, cq.consumer);
    conditions.get_mut(&m.p).unwrap().consumer = b;
    conditions.get_mut(&m.q).unwrap().consumer = a;
    let events: BTreeMap<EventId, _> = process
        .events()
        .iter()
        .map(|(&e, ev)| (e, ev.transition))
        .collect();
    Ok(Process::from_parts(conditions, events))
}

/// Whether `m` satisfies the preconditions of [`swap`] in `process`.
pub fn is_legal(process: &Process, m: SwapMove) -> bool {
    match (process.condition(m.p), process.condition(m.q)) {
        (Some(a), Some(b)) => a.place == b.place && !process.causally_related(m.p, m.q),
        _ => false,
    }
}

/// Legal moves that change the process: `p < q`, equal labels, causally
/// unrelated, different consumers. Sorted.
pub fn effective_moves(process: &Process) -> Vec<SwapMove> {
    let conds: Vec<(CondId, &Condition)> = process.conditions().iter().map(|(&c, x)| (c, x)).collect();
    let mut out = Vec::new();
    for (i, &(p, cp)) in conds.iter().enumerate() {
        for &(q, cq) in &conds[i + 1..] {
            if cp.place == cq.place && cp.consumer != cq.consumer && !process.causally_related(p, q) {
                out.push(SwapMove { p, q });
            }
        }
    }
    out
}

/// `P ≡₁ Q`: some swap of `P` is isomorphic to `Q`. A process without
/// conditions admits no swap and is not `≡₁` to anything.
pub fn one_step_equiv(p: &Process, q: &Process) -> bool {
    if p.condition_count() == 0 {
        return false;
    }
    let target = q.canonical_form();
    if p.canonical_form() == target {
        return true;
    }
    if p.event_labels() != q.event_labels() || p.condition_count() != q.condition_count() {
        return false;
    }
    effective_moves(p)
        .into_iter()
        .any(|m| swap(p, m).map(|r| r.canonical_form() == target).unwrap_or(false))
}

/// A member of a [`SwapClass`].
#[derive(Debug, Clone)]
pub struct ClassMember {
    /// Concrete process, obtained from the parent by one swap.
    pub process: Process,
    pub form: CanonicalForm,
    pub parent: Option<(usize, SwapMove)>,
}

/// The `≡₁*`-class of a process, explored breadth first over canonical
/// forms.
#[derive(Debug, Clone)]
pub struct SwapClass {
    members: Vec<ClassMember>,
    index: HashMap<CanonicalForm, usize>,
    complete: bool,
}

impl SwapClass {
    /// Explores the whole class, storing at most `budget` forms.
    pub fn explore(start: &Process, budget: usize) -> SwapClass {
        Self::explore_until(start, budget, None)
    }

    /// Explores until `target` is found or the class is exhausted.
    pub fn explore_until(start: &Process, budget: usize, target: Option<&CanonicalForm>) -> SwapClass {
        Self::explore_while(start, budget, |m| Some(&m.form) != target)
    }

    /// Breadth-first exploration that stops as soon as `go_on` rejects a
    /// newly found member; that member is then the last one. A class cut
    /// short this way is not complete.
    pub fn explore_while(
        start: &Process,
        budget: usize,
        mut go_on: impl FnMut(&ClassMember) -> bool,
    ) -> SwapClass {
        let budget = budget.max(1);
        let form = start.canonical_form();
        let mut class = SwapClass {
            members: Vec::new(),
            index: HashMap::new(),
            complete: true,
        };
        class.index.insert(form.clone(), 0);
        class.members.push(ClassMember {
            process: start.clone(),
            form,
            parent: None,
        });
        if !go_on(&class.members[0]) {
            class.complete = false;
            return class;
        }
        let mut head = 0;
        while head < class.members.len() {
            let cur = class.members[head].process.clone();
            for m in effective_moves(&cur) {
                let next = swap(&cur, m).expect("effective moves are legal");
                let form = next.canonical_form();
                if class.index.contains_key(&form) {
                    continue;
                }
                if class.members.len() >= budget {
                    class.complete = false;
                    return class;
                }
                class.index.insert(form.clone(), class.members.len());
                class.members.push(ClassMember {
                    process: next,
                    form,
                    parent: Some((head, m)),
                });
                if !go_on(class.members.last().unwrap()) {
                    class.complete = false;
                    return class;
                }
            }
            head += 1;
        }
        class
    }

    pub fn members(&self) -> &[ClassMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// True iff every process `≡₁*` to the start is represented.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn contains(&self, form: &CanonicalForm) -> bool {
        self.index.contains_key(form)
    }

    pub fn index_of(&self, form: &CanonicalForm) -> Option<usize> {
        self.index.get(form).copied()
    }

    pub fn forms(&self) -> impl Iterator<Item = &CanonicalForm> + '_ {
        self.members.iter().map(|m| &m.form)
    }

    /// The least canonical form of the class: a class identifier, available
    /// only for complete classes.
    pub fn key(&self) -> Option<CanonicalForm> {
        if self.complete {
            self.forms().min().cloned()
        } else {
            None
        }
    }

    /// Moves leading from the start to member `i`.
    pub fn moves_to(&self, i: usize) -> Vec<SwapMove> {
        let mut moves = Vec::new();
        let mut cur = i;
        while let Some((parent, m)) = self.members[cur].parent {
            moves.push(m);
            cur = parent;
        }
        moves.reverse();
        moves
    }
}

/// A replayable sequence of swaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapPath {
    pub start: Process,
    pub moves: Vec<SwapMove>,
}

impl SwapPath {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Every intermediate process, starting with `start`.
    pub fn replay(&self) -> Result<Vec<Process>, SwapError> {
        let mut out = vec![self.start.clone()];
        for &m in &self.moves {
            let next = swap(out.last().unwrap(), m)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn end(&self) -> Result<Process, SwapError> {
        Ok(self.replay()?.pop().unwrap())
    }
}

/// Result of [`swap_equiv`].
#[derive(Debug, Clone)]
pub struct EquivOutcome {
    pub verdict: Verdict,
    /// On `Holds`: swaps turning the first process into one isomorphic to
    /// the second.
    pub path: Option<SwapPath>,
    /// Canonical forms stored during the search.
    pub explored: usize,
}

/// Decides `p ≡₁* q` for finite processes.
///
/// The class of the process with the smaller canonical form is explored
/// first; the other side is explored only if the first runs out of budget.
/// `Fails` is returned only when a complete class misses the other process.
pub fn swap_equiv(p: &Process, q: &Process, budget: usize) -> EquivOutcome {
    let fails = |explored| EquivOutcome {
        verdict: Verdict::Fails,
        path: None,
        explored,
    };
    if p.event_labels() != q.event_labels()
        || p.initial_marking() != q.initial_marking()
        || p.final_marking() != q.final_marking()
        || p.condition_count() != q.condition_count()
    {
        return fails(0);
    }
    let (fp, fq) = (p.canonical_form(), q.canonical_form());
    if fp == fq {
        return EquivOutcome {
            verdict: Verdict::Holds,
            path: Some(SwapPath {
                start: p.clone(),
                moves: Vec::new(),
            }),
            explored: 1,
        };
    }
    let p_first = fp < fq;
    let order = if p_first {
        [(p, &fq), (q, &fp)]
    } else {
        [(q, &fp), (p, &fq)]
    };
    let mut explored = 0;
    for (i, (from, target)) in order.into_iter().enumerate() {
        let class = SwapClass::explore_until(from, budget, Some(target));
        explored += class.len();
        if let Some(hit) = class.index_of(target) {
            let moves = class.moves_to(hit);
            let from_p = (i == 0) == p_first;
            let path = if from_p {
                SwapPath {
                    start: p.clone(),
                    moves,
                }
            } else {
                reverse_path(&class.members()[hit].process, p, moves)
            };
            return EquivOutcome {
                verdict: Verdict::Holds,
                path: Some(path),
                explored,
            };
        }
        if class.is_complete() {
            return fails(explored);
        }
    }
    EquivOutcome {
        verdict: Verdict::Unknown,
        path: None,
        explored,
    }
}

/// Given moves `m1..mn` from `Q0` to `end ≅ p`, returns the moves from `p`
/// back to a copy of `Q0`, transported along the isomorphism `end → p`.
fn reverse_path(end: &Process, p: &Process, moves: Vec<SwapMove>) -> SwapPath {
    let iso = end
        .isomorphism(p)
        .expect("class member matched by canonical form");
    SwapPath {
        start: p.clone(),
        moves: moves
            .into_iter()
            .rev()
            .map(|m| m.renamed(&iso.conditions))
            .collect(),
    }
}

/// Result of [`bd_preorder_fin`].
#[derive(Debug, Clone)]
pub struct OrderOutcome {
    pub verdict: Verdict,
    /// On `Holds`: an extension `R ≥ p` (same node ids as `p`) with
    /// `R ≡₁* q`, and the swaps from `R` to a copy of `q`.
    pub witness: Option<(Process, SwapPath)>,
}

/// Extensions of a process level by level, deduplicated per level by
/// canonical form and, when the class is small enough to explore fully, by
/// `≡₁*`-class.
struct ExtensionLevels<'a> {
    net: &'a Net,
    budget: usize,
    frontier: Vec<(Process, Option<SwapClass>)>,
    events: usize,
    /// Every class on every level was explored completely.
    exact: bool,
}

impl<'a> ExtensionLevels<'a> {
    fn new(net: &'a Net, start: &Process, budget: usize) -> Self {
        let mut levels = ExtensionLevels {
            net,
            budget,
            frontier: Vec::new(),
            events: start.event_count(),
            exact: true,
        };
        levels.frontier = levels.dedup(vec![start.clone()]);
        levels
    }

    fn dedup(&mut self, candidates: Vec<Process>) -> Vec<(Process, Option<SwapClass>)> {
        let mut covered: HashSet<CanonicalForm> = HashSet::new();
        let mut out = Vec::new();
        for c in candidates {
            let form = c.canonical_form();
            if covered.contains(&form) {
                continue;
            }
            let class = SwapClass::explore(&c, self.budget);
            if class.is_complete() {
                covered.extend(class.forms().cloned());
                out.push((c, Some(class)));
            } else {
                self.exact = false;
                covered.insert(form);
                out.push((c, None));
            }
        }
        out
    }

    fn advance(&mut self, keep: impl Fn(&Process) -> bool) {
        let candidates: Vec<Process> = self
            .frontier
            .iter()
            .flat_map(|(p, _)| p.concrete_successors(self.net))
            .map(|(_, p)| p)
            .filter(|p| keep(p))
            .collect();
        self.frontier = self.dedup(candidates);
        self.events += 1;
    }
}

/// Decides `p ⊑ q` on finite processes: some extension `R ≥ p` with
/// `R ≡₁* q`.
///
/// When the class of `q` can be explored within the budget this amounts
/// to `p` being isomorphic to a prefix of one of its members. Otherwise
/// extensions of `p` by `|q| - |p|` events are enumerated level by level,
/// deduplicated per level up to `≡₁*`, and each is tested against `q`.
pub fn bd_preorder_fin(net: &Net, p: &Process, q: &Process, budget: usize) -> OrderOutcome {
    let fails = OrderOutcome {
        verdict: Verdict::Fails,
        witness: None,
    };
    if p.event_count() > q.event_count()
        || !p.event_labels().is_submultiset_of(&q.event_labels())
        || p.initial_marking() != q.initial_marking()
    {
        return fails;
    }
    let mut hit = None;
    let q_class = SwapClass::explore_while(q, budget, |m| {
        hit = p.embedding_into(&m.process);
        hit.is_none()
    });
    if let Some(keep) = hit {
        let i = q_class.len() - 1;
        let member = &q_class.members()[i].process;
        let r = align(p, member, &keep);
        let path = reverse_path(member, &r, q_class.moves_to(i));
        return OrderOutcome {
            verdict: Verdict::Holds,
            witness: Some((r, path)),
        };
    }
    if q_class.is_complete() {
        return fails;
    }
    let target_labels = q.event_labels();
    let mut levels = ExtensionLevels::new(net, p, budget);
    while levels.events < q.event_count() && !levels.frontier.is_empty() {
        levels.advance(|r| r.event_labels().is_submultiset_of(&target_labels));
    }
    let q_form = q.canonical_form();
    for (r, class) in &levels.frontier {
        if class.as_ref().is_some_and(|c| c.contains(&q_form)) {
            if let Some(path) = swap_equiv(r, q, budget).path {
                return OrderOutcome {
                    verdict: Verdict::Holds,
                    witness: Some((r.clone(), path)),
                };
            }
        }
    }
    if levels.exact {
        fails
    } else {
        OrderOutcome {
            verdict: Verdict::Unknown,
            witness: None,
        }
    }
}

/// A copy of `big` whose prefix on `keep` is `p` itself, node for node;
/// the remaining nodes get fresh ids. `big ↾ keep` must be isomorphic to
/// `p`.
fn align(p: &Process, big: &Process, keep: &BTreeSet<EventId>) -> Process {
    let prefix = big.prefix_by_events(keep).expect("downward closed");
    let iso = prefix.isomorphism(p).expect("embedding is up to isomorphism");
    let mut next_c = p.next_condition_id().0.max(big.next_condition_id().0);
    let mut next_e = p.next_event_id().0.max(big.next_event_id().0);
    let mut conds = iso.conditions.clone();
    for &c in big.conditions().keys() {
        conds.entry(c).or_insert_with(|| {
            next_c += 1;
            CondId(next_c - 1)
        });
    }
    let mut events = iso.events.clone();
    for &e in big.events().keys() {
        events.entry(e).or_insert_with(|| {
            next_e += 1;
            EventId(next_e - 1)
        });
    }
    big.rename(&conds, &events)
}

/// Result of [`bd_approximations`].
#[derive(Debug, Clone)]
pub struct Approximations {
    pub forms: BTreeSet<CanonicalForm>,
    /// True iff neither the cap nor the depth bound cut the closure short.
    pub complete: bool,
}

/// `⌊P⌋` restricted to processes with at most `depth` events: the smallest
/// set containing the finite prefixes of `p` that is closed under `≡₁` and
/// prefixes. At most `cap` forms are stored.
pub fn bd_approximations(p: &Process, depth: usize, cap: usize) -> Approximations {
    let mut complete = true;
    let starts: Vec<Process> = if p.event_count() <= depth {
        vec![p.clone()]
    } else {
        complete = false;
        p.downward_closed_subsets(depth)
            .into_iter()
            .map(|keep| p.prefix_by_events(&keep).expect("downward closed"))
            .collect()
    };
    let mut forms = BTreeSet::new();
    let mut work = Vec::new();
    for s in starts {
        if forms.insert(s.canonical_form()) {
            work.push(s);
        }
    }
    while let Some(cur) = work.pop() {
        let neighbours = cur.immediate_prefixes().into_iter().chain(
            effective_moves(&cur)
                .into_iter()
                .map(|m| swap(&cur, m).expect("legal")),
        );
        for n in neighbours {
            let f = n.canonical_form();
            if forms.contains(&f) {
                continue;
            }
            if forms.len() >= cap {
                return Approximations {
                    forms,
                    complete: false,
                };
            }
            forms.insert(f);
            work.push(n);
        }
    }
    Approximations { forms, complete }
}

/// Result of [`common_extension`].
#[derive(Debug, Clone)]
pub struct CommonExtension {
    pub verdict: Verdict,
    /// On `Holds`: `P' ≥ p` and `Q' ≥ q` with `P' ≡₁* Q'`.
    pub witness: Option<(Process, Process)>,
}

/// Searches for `P' ≥ p`, `Q' ≥ q` with `P' ≡₁* Q'` among extensions with
/// at most `max_events` events.
///
/// `Fails` means the extensions of one side ran out (every extension chain
/// ended) before a match was found, with all classes fully explored.
pub fn common_extension(
    net: &Net,
    p: &Process,
    q: &Process,
    max_events: usize,
    budget: usize,
) -> CommonExtension {
    let mut lp = ExtensionLevels::new(net, p, budget);
    let mut lq = ExtensionLevels::new(net, q, budget);
    loop {
        while lp.events < lq.events && !lp.frontier.is_empty() {
            lp.advance(|_| true);
        }
        while lq.events < lp.events && !lq.frontier.is_empty() {
            lq.advance(|_| true);
        }
        if lp.frontier.is_empty() || lq.frontier.is_empty() {
            let verdict = if lp.exact && lq.exact {
                Verdict::Fails
            } else {
                Verdict::Unknown
            };
            return CommonExtension {
                verdict,
                witness: None,
            };
        }
        for (pp, pc) in &lp.frontier {
            let pf = pp.canonical_form();
            for (qq, qc) in &lq.frontier {
                let hit = pc.as_ref().is_some_and(|c| c.contains(&qq.canonical_form()))
                    || qc.as_ref().is_some_and(|c| c.contains(&pf));
                if hit {
                    return CommonExtension {
                        verdict: Verdict::Holds,
                        witness: Some((pp.clone(), qq.clone())),
                    };
                }
            }
        }
        if lp.events >= max_events {
            return CommonExtension {
                verdict: Verdict::Unknown,
                witness: None,
            };
        }
        lp.advance(|_| true);
    }
}
