//! The reference nets used throughout the guide, the tests and the `check`
//! command, together with the facts each one is expected to exhibit.

use crate::net::{Net, NetDescription};
use crate::verdict::Verdict;

/// A reference net and the behaviour recorded for it.
#[derive(Debug, Clone)]
pub struct CorpusNet {
    pub name: &'static str,
    pub net: Net,
    pub expected: Expectations,
}

/// Partial classification expected for a [`CorpusNet`]; `None` means "not
/// asserted".
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Expectations {
    pub conflict_free: Option<Verdict>,
    pub binary_conflict_free: Option<Verdict>,
    pub persistent: Option<Verdict>,
    pub structural_conflict_net: Option<Verdict>,
    pub reachable_structural_conflict: Option<Verdict>,
    pub has_structural_conflict_pairs: Option<bool>,
    /// Number of ≤-maximal processes up to isomorphism, when the process set
    /// is finite.
    pub maximal_processes: Option<usize>,
    /// Number of swapping-equivalence classes among the ≤-maximal processes.
    pub maximal_classes: Option<usize>,
}

fn build(desc: NetDescription) -> Net {
    desc.validate().expect("corpus nets are well formed")
}

/// Places 1, 2, 3 marked; `a: 1 -> 4`, `b: 2 -> 4`, `c: {3, 4} -> 5`.
pub fn fig1() -> Net {
    build(
        NetDescription::new("fig1")
            .place("1", 1)
            .place("2", 1)
            .place("3", 1)
            .place("4", 0)
            .place("5", 0)
            .transition("a")
            .transition("b")
            .transition("c")
            .arc("1", "a", 1)
            .arc("a", "4", 1)
            .arc("2", "b", 1)
            .arc("b", "4", 1)
            .arc("3", "c", 1)
            .arc("4", "c", 1)
            .arc("c", "5", 1),
    )
}

/// Two tokens on `p` shared by `a`, `b`, `c`; `d` returns a token to `p`.
pub fn fig2() -> Net {
    let mut d = NetDescription::new("fig2")
        .place("p", 2)
        .place("q", 0)
        .place("pa", 1)
        .place("pb", 1)
        .place("pc", 1)
        .place("pd", 1);
    for t in ["a", "b", "c"] {
        d = d
            .transition(t)
            .arc("p", t, 1)
            .arc(format!("p{t}"), t, 1)
            .arc(t, "q", 1);
    }
    build(
        d.transition("d")
            .arc("q", "d", 1)
            .arc("pd", "d", 1)
            .arc("d", "p", 1),
    )
}

/// One token on `p`; `t` and `u` are both self-loops on `p`.
pub fn fig3() -> Net {
    build(
        NetDescription::new("fig3")
            .place("p", 1)
            .transition("t")
            .transition("u")
            .arc("p", "t", 1)
            .arc("t", "p", 1)
            .arc("p", "u", 1)
            .arc("u", "p", 1),
    )
}

/// `t` and `u` both consume from the unmarked place `p`.
pub fn fig4_left() -> Net {
    build(
        NetDescription::new("fig4-left")
            .place("p", 0)
            .transition("t")
            .transition("u")
            .arc("p", "t", 1)
            .arc("p", "u", 1),
    )
}

/// `t` consumes `p2`; `u` needs `p2` and the unmarked `q2`.
pub fn fig4_right() -> Net {
    build(
        NetDescription::new("fig4-right")
            .place("p2", 1)
            .place("q2", 0)
            .transition("t")
            .transition("u")
            .arc("p2", "t", 1)
            .arc("p2", "u", 1)
            .arc("q2", "u", 1),
    )
}

/// `t: {p, q}`, `u: {q, r}` with two tokens on `q`.
pub fn fig5() -> Net {
    build(
        NetDescription::new("fig5")
            .place("p", 1)
            .place("q", 2)
            .place("r", 1)
            .transition("t")
            .transition("u")
            .arc("p", "t", 1)
            .arc("q", "t", 1)
            .arc("q", "u", 1)
            .arc("r", "u", 1),
    )
}

/// Self-loops `a` on `{1, 2}` and `b` on `{2, 3}`, two tokens on place 2.
pub fn fig6() -> Net {
    build(
        NetDescription::new("fig6")
            .place("1", 1)
            .place("2", 2)
            .place("3", 1)
            .transition("a")
            .transition("b")
            .arc("1", "a", 1)
            .arc("2", "a", 1)
            .arc("a", "1", 1)
            .arc("a", "2", 1)
            .arc("2", "b", 1)
            .arc("3", "b", 1)
            .arc("b", "2", 1)
            .arc("b", "3", 1),
    )
}

/// One token on `s` consumed by either `t` or `u`: the smallest net with a
/// choice to resolve.
pub fn choice() -> Net {
    build(
        NetDescription::new("choice")
            .place("s", 1)
            .place("x", 0)
            .place("y", 0)
            .transition("t")
            .transition("u")
            .arc("s", "t", 1)
            .arc("t", "x", 1)
            .arc("s", "u", 1)
            .arc("u", "y", 1),
    )
}

use Verdict::{Fails, Holds};

/// The reference nets with their recorded expectations.
pub fn corpus() -> Vec<CorpusNet> {
    vec![
        CorpusNet {
            name: "fig1",
            net: fig1(),
            expected: Expectations {
                conflict_free: Some(Holds),
                binary_conflict_free: Some(Holds),
                persistent: Some(Holds),
                structural_conflict_net: Some(Holds),
                reachable_structural_conflict: Some(Fails),
                has_structural_conflict_pairs: Some(false),
                maximal_processes: Some(2),
                maximal_classes: Some(1),
            },
        },
        CorpusNet {
            name: "fig2",
            net: fig2(),
            expected: Expectations {
                conflict_free: Some(Fails),
                binary_conflict_free: Some(Fails),
                persistent: Some(Fails),
                structural_conflict_net: Some(Fails),
                reachable_structural_conflict: Some(Holds),
                has_structural_conflict_pairs: Some(true),
                // regression value, recorded from exhaustive enumeration
                maximal_processes: Some(FIG2_MAXIMAL_PROCESSES),
                maximal_classes: Some(1),
            },
        },
        CorpusNet {
            name: "fig3",
            net: fig3(),
            expected: Expectations {
                conflict_free: Some(Fails),
                binary_conflict_free: Some(Fails),
                persistent: Some(Holds),
                structural_conflict_net: Some(Holds),
                reachable_structural_conflict: Some(Holds),
                has_structural_conflict_pairs: Some(true),
                maximal_processes: None,
                maximal_classes: None,
            },
        },
        CorpusNet {
            name: "fig4-left",
            net: fig4_left(),
            expected: Expectations {
                conflict_free: Some(Holds),
                binary_conflict_free: Some(Holds),
                persistent: Some(Holds),
                structural_conflict_net: Some(Holds),
                reachable_structural_conflict: Some(Fails),
                has_structural_conflict_pairs: Some(true),
                maximal_processes: Some(1),
                maximal_classes: Some(1),
            },
        },
        CorpusNet {
            name: "fig4-right",
            net: fig4_right(),
            expected: Expectations {
                conflict_free: Some(Holds),
                binary_conflict_free: Some(Holds),
                persistent: Some(Holds),
                structural_conflict_net: Some(Holds),
                reachable_structural_conflict: Some(Fails),
                has_structural_conflict_pairs: Some(true),
                maximal_processes: Some(1),
                maximal_classes: Some(1),
            },
        },
        CorpusNet {
            name: "fig5",
            net: fig5(),
            expected: Expectations {
                conflict_free: Some(Holds),
                binary_conflict_free: Some(Holds),
                persistent: Some(Holds),
                structural_conflict_net: Some(Fails),
                reachable_structural_conflict: Some(Holds),
                has_structural_conflict_pairs: Some(true),
                maximal_processes: Some(1),
                maximal_classes: Some(1),
            },
        },
        CorpusNet {
            name: "fig6",
            net: fig6(),
            expected: Expectations {
                conflict_free: Some(Holds),
                binary_conflict_free: Some(Holds),
                persistent: Some(Holds),
                structural_conflict_net: Some(Fails),
                reachable_structural_conflict: Some(Holds),
                has_structural_conflict_pairs: Some(true),
                maximal_processes: None,
                maximal_classes: None,
            },
        },
    ]
}

/// ≤-maximal processes of [`fig2`] up to isomorphism.
pub const FIG2_MAXIMAL_PROCESSES: usize = 6;

/// Looks up a corpus net by name (`fig1`, `fig4-left`, ...; `fig4` is an
/// alias for `fig4-left`, `choice` is the two-way choice net).
pub fn by_name(name: &str) -> Option<Net> {
    match name {
        "fig4" => Some(fig4_left()),
        "choice" => Some(choice()),
        _ => corpus().into_iter().find(|c| c.name == name).map(|c| c.net),
    }
}
