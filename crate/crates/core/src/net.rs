//! Place/transition nets with arc weights, markings and the step firing rule.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::multiset::{Multiset, Overflow};

/// Index of a place in its [`Net`]. Places are numbered in lexicographic
/// order of their names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceId(pub u32);

/// Index of a transition in its [`Net`], in lexicographic name order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionId(pub u32);

/// A node of a net: either a place or a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Place(PlaceId),
    Transition(TransitionId),
}

/// A global state: a multiset of places.
pub type Marking = Multiset<PlaceId>;

/// A multiset of transitions fired together.
pub type Step = Multiset<TransitionId>;

/// A structural defect found while validating a [`NetDescription`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetViolation {
    #[error("transition `{0}` has no preplace")]
    EmptyPreset(String),
    #[error("`{0}` is not declared")]
    UndeclaredId(String),
    #[error("`{0}` is declared more than once")]
    IdClash(String),
    #[error("arc `{0}` -> `{1}` has weight zero")]
    ZeroWeightArc(String, String),
    #[error("arc `{0}` -> `{1}` must connect a place and a transition")]
    IllegalArc(String, String),
    #[error("multiplicity overflow on `{0}`")]
    Overflow(String),
}

/// Failure of [`Net::validate`]: every violated clause, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid net: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidNet(pub Vec<NetViolation>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FireError {
    #[error("empty step")]
    EmptyStep,
    #[error("step is not enabled")]
    NotEnabled,
    #[error("transition at position {index} of the sequence is not enabled")]
    NotEnabledAt { index: usize },
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

/// An unvalidated net, as produced by a parser or a builder.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NetDescription {
    pub name: String,
    /// `(place, initial tokens)`
    pub places: Vec<(String, u64)>,
    pub transitions: Vec<String>,
    /// `(source, target, weight)`
    pub arcs: Vec<(String, String, u64)>,
}

impl NetDescription {
    pub fn new(name: impl Into<String>) -> Self {
        NetDescription {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn place(mut self, id: impl Into<String>, tokens: u64) -> Self {
        self.places.push((id.into(), tokens));
        self
    }

    pub fn transition(mut self, id: impl Into<String>) -> Self {
        self.transitions.push(id.into());
        self
    }

    pub fn arc(mut self, src: impl Into<String>, dst: impl Into<String>, weight: u64) -> Self {
        self.arcs.push((src.into(), dst.into(), weight));
        self
    }

    pub fn validate(&self) -> Result<Net, InvalidNet> {
        Net::validate(self)
    }
}

/// A validated place/transition net `(S, T, F, M0)`.
///
/// Parallel arcs are not represented; the flow function stores one weight per
/// ordered pair.
#[derive(Clone, PartialEq, Eq)]
pub struct Net {
    name: String,
    places: Vec<String>,
    transitions: Vec<String>,
    pre: Vec<Marking>,
    post: Vec<Marking>,
    initial: Marking,
}

impl Net {
    pub fn validate(desc: &NetDescription) -> Result<Net, InvalidNet> {
        let mut violations = Vec::new();
        let mut kinds: BTreeMap<&str, bool> = BTreeMap::new(); // true = place
        for (p, _) in &desc.places {
            if kinds.insert(p.as_str(), true).is_some() {
                violations.push(NetViolation::IdClash(p.clone()));
            }
        }
        for t in &desc.transitions {
            if kinds.insert(t.as_str(), false).is_some() {
                violations.push(NetViolation::IdClash(t.clone()));
            }
        }
        let places: Vec<String> = desc
            .places
            .iter()
            .map(|(p, _)| p.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let transitions: Vec<String> = desc
            .transitions
            .iter()
            .filter(|t| kinds.get(t.as_str()) == Some(&false))
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let place_id = |s: &str| {
            places
                .binary_search_by(|p| p.as_str().cmp(s))
                .ok()
                .map(|i| PlaceId(i as u32))
        };
        let trans_id = |s: &str| {
            transitions
                .binary_search_by(|t| t.as_str().cmp(s))
                .ok()
                .map(|i| TransitionId(i as u32))
        };

        let mut initial = Marking::new();
        for (p, k) in &desc.places {
            if kinds.get(p.as_str()) == Some(&true) {
                if let Some(id) = place_id(p) {
                    if initial.try_insert(id, *k).is_err() {
                        violations.push(NetViolation::Overflow(p.clone()));
                    }
                }
            }
        }

        let mut pre = vec![Marking::new(); transitions.len()];
        let mut post = vec![Marking::new(); transitions.len()];
        for (src, dst, w) in &desc.arcs {
            let (sk, dk) = (kinds.get(src.as_str()), kinds.get(dst.as_str()));
            if sk.is_none() {
                violations.push(NetViolation::UndeclaredId(src.clone()));
            }
            if dk.is_none() {
                violations.push(NetViolation::UndeclaredId(dst.clone()));
            }
            let (Some(&sk), Some(&dk)) = (sk, dk) else {
                continue;
            };
            if *w == 0 {
                violations.push(NetViolation::ZeroWeightArc(src.clone(), dst.clone()));
                continue;
            }
            let target = match (sk, dk) {
                (true, false) => place_id(src).zip(trans_id(dst)).map(|(p, t)| (&mut pre, t, p)),
                (false, true) => trans_id(src).zip(place_id(dst)).map(|(t, p)| (&mut post, t, p)),
                _ => {
                    violations.push(NetViolation::IllegalArc(src.clone(), dst.clone()));
                    None
                }
            };
            if let Some((side, t, p)) = target {
                if side[t.0 as usize].try_insert(p, *w).is_err() {
                    violations.push(NetViolation::Overflow(format!("{src}->{dst}")));
                }
            }
        }
        for (i, t) in transitions.iter().enumerate() {
            if pre[i].is_empty() {
                violations.push(NetViolation::EmptyPreset(t.clone()));
            }
        }

        if !violations.is_empty() {
            return Err(InvalidNet(violations));
        }
        Ok(Net {
            name: desc.name.clone(),
            places,
            transitions,
            pre,
            post,
            initial,
        })
    }

    /// The inverse of [`Net::validate`], in canonical (sorted) order.
    pub fn describe(&self) -> NetDescription {
        let mut desc = NetDescription::new(self.name.clone());
        for p in self.places() {
            desc.places
                .push((self.place_name(p).to_string(), self.initial.get(&p)));
        }
        for t in self.transitions() {
            desc.transitions.push(self.transition_name(t).to_string());
        }
        for t in self.transitions() {
            for (p, w) in self.pre(t).iter() {
                desc.arcs
                    .push((self.place_name(*p).into(), self.transition_name(t).into(), w));
            }
            for (p, w) in self.post(t).iter() {
                desc.arcs
                    .push((self.transition_name(t).into(), self.place_name(*p).into(), w));
            }
        }
        desc
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> + Clone {
        (0..self.places.len() as u32).map(PlaceId)
    }

    pub fn transitions(&self) -> impl Iterator<Item = TransitionId> + Clone {
        (0..self.transitions.len() as u32).map(TransitionId)
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.0 as usize]
    }

    pub fn transition_name(&self, t: TransitionId) -> &str {
        &self.transitions[t.0 as usize]
    }

    pub fn node_name(&self, x: Node) -> &str {
        match x {
            Node::Place(p) => self.place_name(p),
            Node::Transition(t) => self.transition_name(t),
        }
    }

    pub fn place(&self, name: &str) -> Option<PlaceId> {
        self.places
            .binary_search_by(|p| p.as_str().cmp(name))
            .ok()
            .map(|i| PlaceId(i as u32))
    }

    pub fn transition(&self, name: &str) -> Option<TransitionId> {
        self.transitions
            .binary_search_by(|t| t.as_str().cmp(name))
            .ok()
            .map(|i| TransitionId(i as u32))
    }

    pub fn node(&self, name: &str) -> Option<Node> {
        self.place(name)
            .map(Node::Place)
            .or_else(|| self.transition(name).map(Node::Transition))
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    /// `•t` as a multiset of places.
    pub fn pre(&self, t: TransitionId) -> &Marking {
        &self.pre[t.0 as usize]
    }

    /// `t•` as a multiset of places.
    pub fn post(&self, t: TransitionId) -> &Marking {
        &self.post[t.0 as usize]
    }

    /// `F(x, y)`; zero for absent arcs and for place/place or
    /// transition/transition pairs.
    pub fn flow(&self, x: Node, y: Node) -> u64 {
        match (x, y) {
            (Node::Place(p), Node::Transition(t)) => self.pre(t).get(&p),
            (Node::Transition(t), Node::Place(p)) => self.post(t).get(&p),
            _ => 0,
        }
    }

    /// `•x` for any node: `•x(y) = F(y, x)`.
    pub fn preset(&self, x: Node) -> Multiset<Node> {
        match x {
            Node::Transition(t) => self.pre(t).map(|p| Node::Place(*p)),
            Node::Place(p) => self
                .transitions()
                .map(|t| (Node::Transition(t), self.post(t).get(&p)))
                .collect(),
        }
    }

    /// `x•` for any node: `x•(y) = F(x, y)`.
    pub fn postset(&self, x: Node) -> Multiset<Node> {
        match x {
            Node::Transition(t) => self.post(t).map(|p| Node::Place(*p)),
            Node::Place(p) => self
                .transitions()
                .map(|t| (Node::Transition(t), self.pre(t).get(&p)))
                .collect(),
        }
    }

    /// `•G = Σ G(t)·•t`.
    pub fn step_preset(&self, g: &Step) -> Result<Marking, Overflow> {
        let mut out = Marking::new();
        for (t, k) in g.iter() {
            out = out.checked_sum(&self.pre(*t).checked_scale(k)?)?;
        }
        Ok(out)
    }

    /// `G• = Σ G(t)·t•`.
    pub fn step_postset(&self, g: &Step) -> Result<Marking, Overflow> {
        let mut out = Marking::new();
        for (t, k) in g.iter() {
            out = out.checked_sum(&self.post(*t).checked_scale(k)?)?;
        }
        Ok(out)
    }

    /// Whether the step `g` is enabled at `m`, i.e. `•G ⊆ M`.
    pub fn enabled(&self, m: &Marking, g: &Step) -> Result<bool, FireError> {
        if g.is_empty() {
            return Err(FireError::EmptyStep);
        }
        match self.step_preset(g) {
            Ok(pre) => Ok(pre.is_submultiset_of(m)),
            // a preset larger than any representable marking is never covered
            Err(Overflow) => Ok(false),
        }
    }

    /// Single-transition enabledness.
    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> bool {
        self.pre(t).is_submultiset_of(m)
    }

    pub fn enabled_transitions<'a>(&'a self, m: &'a Marking) -> impl Iterator<Item = TransitionId> + 'a {
        self.transitions().filter(move |&t| self.is_enabled(m, t))
    }

    /// Largest `k` with `k·•t ⊆ M`.
    pub fn enabling_degree(&self, m: &Marking, t: TransitionId) -> u64 {
        self.pre(t).iter().map(|(p, w)| m.get(p) / w).min().unwrap_or(0)
    }

    /// `M' = (M - •G) + G•`.
    pub fn fire_step(&self, m: &Marking, g: &Step) -> Result<Marking, FireError> {
        if !self.enabled(m, g)? {
            return Err(FireError::NotEnabled);
        }
        let pre = self.step_preset(g)?;
        let post = self.step_postset(g)?;
        Ok(m.monus(&pre).checked_sum(&post)?)
    }

    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking, FireError> {
        self.fire_step(m, &Step::singleton(t, 1))
    }

    /// Fires the word `sigma` transition by transition.
    pub fn fire_sequence(&self, m: &Marking, sigma: &[TransitionId]) -> Result<Marking, FireError> {
        let mut cur = m.clone();
        for (index, &t) in sigma.iter().enumerate() {
            cur = match self.fire(&cur, t) {
                Ok(next) => next,
                Err(FireError::NotEnabled) => return Err(FireError::NotEnabledAt { index }),
                Err(e) => return Err(e),
            };
        }
        Ok(cur)
    }

    /// Renders a marking as `{a, b, b}`.
    pub fn show_marking(&self, m: &Marking) -> String {
        let items: Vec<&str> = m.expanded().map(|&p| self.place_name(p)).collect();
        format!("{{{}}}", items.join(", "))
    }

    /// Renders a step as `{t, u}`.
    pub fn show_step(&self, g: &Step) -> String {
        let items: Vec<&str> = g.expanded().map(|&t| self.transition_name(t)).collect();
        format!("{{{}}}", items.join(", "))
    }

    /// Builds a marking from place names; unknown names yield `None`.
    pub fn marking_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Option<Marking> {
        names.into_iter().map(|n| self.place(n)).collect()
    }

    /// Builds a step from transition names; unknown names yield `None`.
    pub fn step_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Option<Step> {
        names.into_iter().map(|n| self.transition(n)).collect()
    }
}

impl fmt::Debug for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Net")
            .field("name", &self.name)
            .field("places", &self.places)
            .field("transitions", &self.transitions)
            .field("initial", &self.show_marking(&self.initial))
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn fig1_validates() {
        let net = corpus::fig1();
        assert_eq!(net.place_count(), 5);
        assert_eq!(net.transition_count(), 3);
    }

    #[test]
    fn empty_preset_is_rejected() {
        let err = NetDescription::new("bad")
            .place("p", 1)
            .transition("t")
            .arc("t", "p", 1)
            .validate()
            .unwrap_err();
        assert_eq!(err.0, vec![NetViolation::EmptyPreset("t".into())]);
    }

    #[test]
    fn id_clash_is_rejected() {
        let err = NetDescription::new("bad")
            .place("a", 1)
            .transition("a")
            .arc("a", "a", 1)
            .validate()
            .unwrap_err();
        assert!(err.0.contains(&NetViolation::IdClash("a".into())));
    }

    #[test]
    fn undeclared_and_zero_weight() {
        let err = NetDescription::new("bad")
            .place("p", 1)
            .transition("t")
            .arc("p", "t", 0)
            .arc("q", "t", 1)
            .validate()
            .unwrap_err();
        assert!(err
            .0
            .contains(&NetViolation::ZeroWeightArc("p".into(), "t".into())));
        assert!(err.0.contains(&NetViolation::UndeclaredId("q".into())));
        assert!(err.0.contains(&NetViolation::EmptyPreset("t".into())));
    }

    #[test]
    fn place_to_place_arc_is_rejected() {
        let err = NetDescription::new("bad")
            .place("p", 1)
            .place("q", 0)
            .transition("t")
            .arc("p", "t", 1)
            .arc("p", "q", 1)
            .validate()
            .unwrap_err();
        assert_eq!(err.0, vec![NetViolation::IllegalArc("p".into(), "q".into())]);
    }

    #[test]
    fn degenerate_net_without_transitions() {
        let net = NetDescription::new("idle")
            .place("p", 2)
            .place("iso", 0)
            .validate()
            .unwrap();
        assert_eq!(net.enabled_transitions(net.initial_marking()).count(), 0);
    }

    #[test]
    fn presets_and_postsets() {
        let net = corpus::fig1();
        let c = Node::Transition(net.transition("c").unwrap());
        let pre = net.preset(c);
        let expect: Multiset<Node> = ["3", "4"]
            .iter()
            .map(|n| Node::Place(net.place(n).unwrap()))
            .collect();
        assert_eq!(pre, expect);
        let cc = net.step_of(["c", "c"]).unwrap();
        assert_eq!(
            net.step_preset(&cc).unwrap(),
            net.marking_of(["3", "3", "4", "4"]).unwrap()
        );

        let fig3 = corpus::fig3();
        let t = fig3.transition("t").unwrap();
        let p = fig3.marking_of(["p"]).unwrap();
        assert_eq!(fig3.pre(t), &p);
        assert_eq!(fig3.post(t), &p);
        // place-side presets collect producing transitions
        let four = Node::Place(net.place("4").unwrap());
        assert_eq!(net.preset(four).cardinality(), 2);
        assert_eq!(net.postset(four).cardinality(), 1);
    }

    #[test]
    fn enabledness() {
        let fig1 = corpus::fig1();
        let m0 = fig1.initial_marking();
        assert!(fig1.enabled(m0, &fig1.step_of(["a", "b"]).unwrap()).unwrap());

        let fig2 = corpus::fig2();
        assert!(!fig2
            .enabled(fig2.initial_marking(), &fig2.step_of(["a", "b", "c"]).unwrap())
            .unwrap());

        let fig3 = corpus::fig3();
        assert!(!fig3
            .enabled(fig3.initial_marking(), &fig3.step_of(["t", "t"]).unwrap())
            .unwrap());
        assert_eq!(
            fig3.enabled(fig3.initial_marking(), &Step::new()),
            Err(FireError::EmptyStep)
        );
    }

    #[test]
    fn step_firing() {
        let fig1 = corpus::fig1();
        let m0 = fig1.initial_marking();
        let m = fig1.fire_step(m0, &fig1.step_of(["a", "b"]).unwrap()).unwrap();
        assert_eq!(m, fig1.marking_of(["3", "4", "4"]).unwrap());
        assert_eq!(
            fig1.fire_step(m0, &fig1.step_of(["c"]).unwrap()),
            Err(FireError::NotEnabled)
        );

        let fig3 = corpus::fig3();
        let m = fig3
            .fire_step(fig3.initial_marking(), &fig3.step_of(["t"]).unwrap())
            .unwrap();
        assert_eq!(&m, fig3.initial_marking());
    }

    #[test]
    fn sequence_firing() {
        let fig1 = corpus::fig1();
        let m0 = fig1.initial_marking();
        let abc: Vec<_> = ["a", "b", "c"]
            .iter()
            .map(|n| fig1.transition(n).unwrap())
            .collect();
        assert_eq!(
            fig1.fire_sequence(m0, &abc).unwrap(),
            fig1.marking_of(["4", "5"]).unwrap()
        );
        assert_eq!(&fig1.fire_sequence(m0, &[]).unwrap(), m0);

        let fig2 = corpus::fig2();
        let abc: Vec<_> = ["a", "b", "c"]
            .iter()
            .map(|n| fig2.transition(n).unwrap())
            .collect();
        assert_eq!(
            fig2.fire_sequence(fig2.initial_marking(), &abc),
            Err(FireError::NotEnabledAt { index: 2 })
        );
    }

    #[test]
    fn describe_roundtrips() {
        for c in corpus::corpus() {
            assert_eq!(c.net.describe().validate().unwrap(), c.net);
        }
    }
}
