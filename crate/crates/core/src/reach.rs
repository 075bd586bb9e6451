//! Bounded breadth-first exploration of reachable markings.

use std::collections::HashMap;

use crate::net::{Marking, Net, TransitionId};

/// The reachable part of a net's marking graph, possibly truncated.
#[derive(Debug, Clone)]
pub struct MarkingGraph {
    vertices: Vec<Marking>,
    index: HashMap<Marking, usize>,
    /// `(source, transition, target)` as vertex indices.
    edges: Vec<(usize, TransitionId, usize)>,
    /// BFS predecessor of each vertex (none for the initial marking).
    parent: Vec<Option<(usize, TransitionId)>>,
    complete: bool,
    cap: usize,
}

impl MarkingGraph {
    /// Explores at most `cap` markings breadth first from `M0`.
    ///
    /// Vertices are numbered in discovery order: by parent, then by
    /// transition, so numbering and edge order are reproducible. The graph is
    /// `complete` iff every successor of every vertex is itself a vertex.
    pub fn explore(net: &Net, cap: usize) -> Self {
        let cap = cap.max(1);
        let mut g = MarkingGraph {
            vertices: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            parent: Vec::new(),
            complete: true,
            cap,
        };
        g.add(net.initial_marking().clone(), None);
        let mut layer = vec![0usize];
        while !layer.is_empty() {
            let mut discovered: Vec<(Marking, usize, TransitionId)> = Vec::new();
            for &v in &layer {
                let m = g.vertices[v].clone();
                for t in net.transitions() {
                    if !net.is_enabled(&m, t) {
                        continue;
                    }
                    let Ok(next) = net.fire(&m, t) else {
                        // overflow: the successor cannot be represented
                        g.complete = false;
                        continue;
                    };
                    discovered.push((next, v, t));
                }
            }
            let mut fresh: Vec<(Marking, usize, TransitionId)> = Vec::new();
            let mut pending: Vec<(usize, TransitionId, Marking)> = Vec::new();
            let mut seen = std::collections::HashSet::new();
            for (m, v, t) in discovered {
                if !g.index.contains_key(&m) && seen.insert(m.clone()) {
                    fresh.push((m.clone(), v, t));
                }
                pending.push((v, t, m));
            }
            let mut next_layer = Vec::new();
            for (m, v, t) in fresh {
                if g.vertices.len() >= cap {
                    g.complete = false;
                    break;
                }
                next_layer.push(g.add(m, Some((v, t))));
            }
            for (v, t, m) in pending {
                if let Some(&w) = g.index.get(&m) {
                    g.edges.push((v, t, w));
                }
            }
            layer = next_layer;
        }
        g.edges.sort();
        g.edges.dedup();
        g
    }

    fn add(&mut self, m: Marking, parent: Option<(usize, TransitionId)>) -> usize {
        let id = self.vertices.len();
        self.index.insert(m.clone(), id);
        self.vertices.push(m);
        self.parent.push(parent);
        id
    }

    pub fn vertices(&self) -> &[Marking] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, TransitionId, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True iff the vertex set is closed under single-transition firing.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn index_of(&self, m: &Marking) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn contains(&self, m: &Marking) -> bool {
        self.index.contains_key(m)
    }

    /// A firing sequence leading from `M0` to vertex `v` along BFS tree edges.
    pub fn path_to(&self, v: usize) -> Vec<TransitionId> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some((p, t)) = self.parent[cur] {
            path.push(t);
            cur = p;
        }
        path.reverse();
        path
    }

    /// True iff no reachable marking puts two tokens on one place.
    /// Only meaningful when the graph is complete.
    pub fn is_safe(&self) -> bool {
        self.vertices.iter().all(|m| m.iter().all(|(_, k)| k <= 1))
    }
}
