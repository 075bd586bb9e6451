//! Breadth-first enumeration of finite processes up to isomorphism.

use std::collections::HashMap;

use crate::canon::CanonicalForm;
use crate::net::{Net, TransitionId};
use crate::process::Process;

/// One enumerated isomorphism class.
#[derive(Debug, Clone)]
pub struct Enumerated {
    /// Canonical representative of the class.
    pub process: Process,
    pub form: CanonicalForm,
    /// One-event extensions, as `(transition, index)`; only filled for
    /// processes below the depth bound.
    pub successors: Vec<(TransitionId, usize)>,
    /// True iff the process has no proper extension at all.
    pub maximal: bool,
}

/// All finite processes with at most `depth` events, up to isomorphism.
#[derive(Debug, Clone)]
pub struct Unfolding {
    pub processes: Vec<Enumerated>,
    pub depth: usize,
    pub cap: usize,
    /// True iff neither bound cut the search short: every process of the
    /// net is in `processes`.
    pub complete: bool,
    index: HashMap<CanonicalForm, usize>,
}

impl Unfolding {
    /// Enumerates processes level by level (level = number of events),
    /// keeping at most `cap` isomorphism classes.
    pub fn explore(net: &Net, depth: usize, cap: usize) -> Unfolding {
        let init = Process::initial(net).canonical_representative();
        let form = init.canonical_form();
        let mut u = Unfolding {
            processes: Vec::new(),
            depth,
            cap,
            complete: true,
            index: HashMap::new(),
        };
        u.push(init, form);
        let mut level = vec![0usize];
        for d in 0..=depth {
            let mut next_level = Vec::new();
            for &i in &level {
                let succ = u.processes[i].process.successors(net);
                u.processes[i].maximal = succ.is_empty();
                if d == depth {
                    if !succ.is_empty() {
                        u.complete = false;
                    }
                    continue;
                }
                let mut edges = Vec::new();
                for (t, p) in succ {
                    let form = p.canonical_form();
                    let j = match u.index.get(&form) {
                        Some(&j) => j,
                        None => {
                            if u.processes.len() >= cap {
                                u.complete = false;
                                continue;
                            }
                            let j = u.push(p.canonical_representative(), form);
                            next_level.push(j);
                            j
                        }
                    };
                    edges.push((t, j));
                }
                u.processes[i].successors = edges;
            }
            level = next_level;
            if level.is_empty() {
                break;
            }
        }
        u
    }

    fn push(&mut self, process: Process, form: CanonicalForm) -> usize {
        let i = self.processes.len();
        self.index.insert(form.clone(), i);
        self.processes.push(Enumerated {
            process,
            form,
            successors: Vec::new(),
            maximal: false,
        });
        i
    }

    pub fn len(&self) -> usize {
        self.processes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.processes.is_empty()
    }

    pub fn index_of(&self, form: &CanonicalForm) -> Option<usize> {
        self.index.get(form).copied()
    }

    pub fn contains(&self, form: &CanonicalForm) -> bool {
        self.index.contains_key(form)
    }

    /// The ≤-maximal processes found.
    pub fn maximal(&self) -> impl Iterator<Item = &Enumerated> + '_ {
        self.processes.iter().filter(|e| e.maximal)
    }

    pub fn forms(&self) -> impl Iterator<Item = &CanonicalForm> + '_ {
        self.processes.iter().map(|e| &e.form)
    }
}
