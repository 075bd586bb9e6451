//! Process semantics for place/transition nets.
//!
//! The crate covers the firing rule on markings, GR-processes (occurrence
//! nets labelled into a net), canonical forms for processes, the swapping
//! transformation with the equivalence and preorder it induces, a taxonomy
//! of conflict notions, and a harness that re-checks the relationships
//! between them on small nets.
//!
//! ```
//! use bdproc::{corpus, Process, swapping};
//!
//! let net = corpus::fig1();
//! let unfolding = bdproc::Unfolding::explore(&net, 3, 1000);
//! let maximal: Vec<&Process> = unfolding.maximal().map(|e| &e.process).collect();
//! assert_eq!(maximal.len(), 2);
//! let outcome = swapping::swap_equiv(maximal[0], maximal[1], 1000);
//! assert_eq!(outcome.verdict, bdproc::Verdict::Holds);
//! ```

pub mod canon;
pub mod cli;
pub mod conflict;
pub mod corpus;
pub mod dot;
pub mod enumerate;
pub mod format;
pub mod harness;
pub mod multiset;
pub mod net;
pub mod process;
pub mod reach;
pub mod report;
pub mod swapping;
pub mod verdict;

pub use canon::{CanonicalForm, Isomorphism};
pub use enumerate::Unfolding;
pub use multiset::Multiset;
pub use net::{FireError, Marking, Net, NetDescription, Node, PlaceId, Step, TransitionId};
pub use process::{CondId, EventId, Process, ProcessDescription};
pub use reach::MarkingGraph;
pub use verdict::Verdict;

/// Default budget on canonical forms per search.
pub const DEFAULT_BUDGET: usize = 100_000;

/// Name of the environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "BDPROC_BUDGET";

/// [`DEFAULT_BUDGET`], unless overridden by a positive integer in
/// `BDPROC_BUDGET`.
pub fn default_budget() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&b: &usize| b > 0)
        .unwrap_or(DEFAULT_BUDGET)
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/nets.md")]
    mod nets {}
    #[doc = include_str!("../../../book/src/processes.md")]
    mod processes {}
    #[doc = include_str!("../../../book/src/swapping.md")]
    mod swapping {}
    #[doc = include_str!("../../../book/src/conflicts.md")]
    mod conflicts {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
