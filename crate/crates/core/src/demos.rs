//! Bundled example programs with their known results.

use crate::interp::TruthValue::{self, *};

/// The counterexample to extensionality of the well-founded model:
/// `p` and `q` denote the same function on truth values, yet `s p` is false
/// while `s q` is undefined.
pub const COUNTEREXAMPLE: &str = "\
% s applies its argument to itself, via s
type s : (o -> o) -> o.
type p : o -> o.
type q : o -> o.
type w : o -> o.

s Q <- Q (s Q).
p R <- R.
q R <- ~(w R).
w R <- ~R.
";

/// A positive higher-order program with an identity combinator.
pub const POSITIVE: &str = "\
type q : i -> o.
type p : (i -> o) -> o.
type id : (i -> o) -> i -> o.

q a.
q b.
p Q <- Q a.
id R X <- R X.
";

/// Stratified: `{q} < {p}`.
pub const STRATIFIED: &str = "\
type p : (i -> o) -> o.
type q : i -> o.

p Q <- ~(Q a).
q X <- X = a.
";

/// Not stratified: `q a` may be substituted for `Q`, and the type of `q`
/// is at least that of `Q`.
pub const UNSTRATIFIED: &str = "\
type p : (i -> o) -> o.
type q : i -> i -> o.

p Q <- ~(Q a).
q X Y <- X = a, Y = a, p (q a).
";

pub const SUBSET: &str = "\
type subset : (i -> o) -> (i -> o) -> o.
type nonsubset : (i -> o) -> (i -> o) -> o.
type p : i -> o.
type q : i -> o.

subset S1 S2 <- ~(nonsubset S1 S2).
nonsubset S1 S2 <- S1 X, ~(S2 X).
p a.
q a.
q b.
";

/// Best tuples of a relation under a preference. `gt` stands in for the
/// comparison on rankings.
pub const WINNOW: &str = "\
type movie : i -> o.
type ranking : i -> i -> o.
type gt : i -> i -> o.
type prefer : i -> i -> o.
type winnow : (i -> i -> o) -> (i -> o) -> i -> o.
type bypassed : (i -> i -> o) -> (i -> o) -> i -> o.

movie m1.
movie m2.
movie m3.
ranking m1 r2.
ranking m2 r1.
ranking m3 r2.
gt r2 r1.

prefer M1 M2 <- movie M1, movie M2, ranking M1 R1, ranking M2 R2, gt R1 R2.
winnow P R T <- R T, ~(bypassed P R T).
bypassed P R T <- R T1, P T1 T.
";

/// Programs violating the head restriction, with the rule they break.
pub const ILLEGAL: &[(&str, &str)] = &[
    ("q a. r q.", "NonVariableHeadArgument"),
    ("type q : i -> o. type r : (i -> o) -> o. q a. r q.", "NonVariableHeadArgument"),
    ("type p : (i -> o) -> (i -> o) -> o. p Q Q <- Q a.", "RepeatedHeadVariable"),
];

/// A bundled program together with the values it must produce.
#[derive(Clone, Copy, Debug)]
pub struct Demo {
    pub name: &'static str,
    pub source: &'static str,
    pub depth: usize,
    /// Roots for demand grounding; empty means exhaustive grounding.
    pub roots: &'static [&'static str],
    pub expected: &'static [(&'static str, TruthValue)],
}

pub const DEMOS: &[Demo] = &[
    Demo {
        name: "lemma1",
        source: COUNTEREXAMPLE,
        depth: 3,
        roots: &["s p", "s q"],
        expected: &[
            ("s p", False),
            ("p (s p)", False),
            ("s q", Undefined),
            ("q (s q)", Undefined),
            ("w (s q)", Undefined),
        ],
    },
    Demo {
        name: "bezem",
        source: POSITIVE,
        depth: 2,
        roots: &[],
        expected: &[
            ("q a", True),
            ("q b", True),
            ("p q", True),
            ("id q a", True),
            ("id q b", True),
            ("p (id q)", True),
        ],
    },
    Demo {
        name: "stratified",
        source: STRATIFIED,
        depth: 3,
        roots: &[],
        expected: &[("q a", True), ("p q", False)],
    },
    Demo {
        name: "subset",
        source: SUBSET,
        depth: 3,
        roots: &["subset p q", "subset q p"],
        expected: &[("subset p q", True), ("subset q p", False), ("nonsubset q p", True)],
    },
    Demo {
        name: "winnow",
        source: WINNOW,
        depth: 3,
        roots: &["winnow prefer movie m1", "winnow prefer movie m2", "winnow prefer movie m3"],
        expected: &[
            ("winnow prefer movie m1", True),
            ("winnow prefer movie m2", False),
            ("winnow prefer movie m3", True),
        ],
    },
];

pub fn demo(name: &str) -> Option<&'static Demo> {
    DEMOS.iter().find(|d| d.name == name)
}
