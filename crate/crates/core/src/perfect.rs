//! Stratification and perfect models.
//!
//! A program is stratified when its predicate constants can be layered so
//! that a clause for `p` only uses `q` positively from layers `<= p`'s and
//! negatively from layers `< p`'s. A body literal headed by a predicate
//! variable `Q` counts as a use of every predicate constant whose type is at
//! least `Q`'s type, since any of them may end up in that position.
//!
//! Ground atoms inherit the layer of their leftmost predicate constant, which
//! makes every grounding of a stratified program locally stratified. The
//! perfect model is then built stratum by stratum with the `Ψ_J` operator.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;
use thiserror::Error;

use crate::ast::{Expr, ExprKind};
use crate::grounder::{AtomId, GroundLiteral, GroundProgram};
use crate::interp::{leq, Ordering, PartialInterpretation, TruthValue};
use crate::typecheck::Program;

/// A dependency of a clause head on a predicate constant used in its body.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Dependency {
    pub from: String,
    pub to: String,
    pub negative: bool,
    /// The predicate variable through which the dependency arises, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
    pub clause: usize,
}

impl std::fmt::Display for Dependency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let arrow = if self.negative { "-<->" } else { "-<=->" };
        write!(f, "{} {arrow} {}", self.from, self.to)?;
        if let Some(v) = &self.via {
            write!(f, " (via {v})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PerfectError {
    #[error("program is not stratified: cycle through negation {}", fmt_cycle(.cycle))]
    Unstratifiable { cycle: Vec<Dependency> },
    #[error("stratum assignment violates the conditions at {0}")]
    InvalidStratification(Dependency),
    #[error("ground clause `{clause}` is not locally stratified at `{literal}`")]
    Violation { clause: String, literal: String },
    #[error("perfect-model stages are not increasing in information at stage {stage}")]
    NotIncreasing { stage: usize },
}

fn fmt_cycle(c: &[Dependency]) -> String {
    c.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
}

/// The dependencies of every clause.
pub fn dependencies(program: &Program) -> Vec<Dependency> {
    let sig = program.signature();
    let mut out = Vec::new();
    for (ci, clause) in program.clauses().iter().enumerate() {
        for lit in &clause.body {
            let (atom, negative): (&Expr, bool) = match lit.kind() {
                ExprKind::Eq(..) => continue,
                ExprKind::Neg(a) => (a, true),
                _ => (lit, false),
            };
            let head = atom.spine().0;
            match head.kind() {
                ExprKind::PredConst(q) => out.push(Dependency {
                    from: q.to_string(),
                    to: clause.head.to_string(),
                    negative,
                    via: None,
                    clause: ci,
                }),
                ExprKind::PredVar(v) => {
                    for (q, ty) in sig.predicates() {
                        if ty.is_at_least(head.ty()) {
                            out.push(Dependency {
                                from: q.to_string(),
                                to: clause.head.to_string(),
                                negative,
                                via: Some(v.to_string()),
                                clause: ci,
                            });
                        }
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// A layering `S_1, ..., S_r` of the predicate constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stratification {
    pub strata: Vec<Vec<String>>,
    #[serde(skip)]
    stratum: BTreeMap<String, usize>,
}

impl Stratification {
    /// Checks an explicit assignment (strata numbered from 1).
    pub fn from_assignment(program: &Program, stratum: BTreeMap<String, usize>) -> Result<Self, PerfectError> {
        for d in dependencies(program) {
            let (f, t) = (stratum.get(&d.from).copied().unwrap_or(1), stratum.get(&d.to).copied().unwrap_or(1));
            if (d.negative && f >= t) || f > t {
                return Err(PerfectError::InvalidStratification(d));
            }
        }
        let mut full = BTreeMap::new();
        for (p, _) in program.signature().predicates() {
            full.insert(p.to_string(), stratum.get(&**p).copied().unwrap_or(1).max(1));
        }
        let r = full.values().copied().max().unwrap_or(0);
        let mut strata = vec![Vec::new(); r];
        for (p, &s) in &full {
            strata[s - 1].push(p.clone());
        }
        Ok(Stratification { strata, stratum: full })
    }

    /// Stratum (from 1) of a predicate constant.
    pub fn stratum(&self, predicate: &str) -> Option<usize> {
        self.stratum.get(predicate).copied()
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }
}

/// The least stratification, where each predicate sits in the lowest stratum
/// the conditions allow.
pub fn stratify(program: &Program) -> Result<Stratification, PerfectError> {
    let deps = dependencies(program);
    let mut graph: DiGraph<String, usize> = DiGraph::new();
    let mut node: HashMap<String, NodeIndex> = HashMap::new();
    for (p, _) in program.signature().predicates() {
        node.insert(p.to_string(), graph.add_node(p.to_string()));
    }
    for (i, d) in deps.iter().enumerate() {
        graph.add_edge(node[&d.from], node[&d.to], i);
    }

    let sccs = tarjan_scc(&graph);
    let mut component = vec![0usize; graph.node_count()];
    for (ci, scc) in sccs.iter().enumerate() {
        for &n in scc {
            component[n.index()] = ci;
        }
    }
    for d in &deps {
        let (f, t) = (node[&d.from], node[&d.to]);
        if d.negative && component[f.index()] == component[t.index()] {
            return Err(PerfectError::Unstratifiable { cycle: cycle_through(&graph, &deps, &component, d) });
        }
    }

    // Components come out in reverse topological order.
    let mut level = vec![1usize; graph.node_count()];
    for scc in sccs.iter().rev() {
        let mut l = 1;
        for &n in scc {
            for e in graph.edges_directed(n, petgraph::Direction::Incoming) {
                let d = &deps[*e.weight()];
                let src = petgraph::visit::EdgeRef::source(&e);
                if component[src.index()] != component[n.index()] {
                    l = l.max(level[src.index()] + usize::from(d.negative));
                }
            }
        }
        for &n in scc {
            level[n.index()] = l;
        }
    }
    let assignment = graph.node_indices().map(|n| (graph[n].clone(), level[n.index()])).collect();
    Stratification::from_assignment(program, assignment)
}

/// A cycle that starts with the negative dependency `d` and returns to its
/// source within one strongly connected component.
fn cycle_through(graph: &DiGraph<String, usize>, deps: &[Dependency], component: &[usize], d: &Dependency) -> Vec<Dependency> {
    let find = |name: &str| graph.node_indices().find(|&n| graph[n] == name).expect("node");
    let (start, goal) = (find(&d.to), find(&d.from));
    let comp = component[start.index()];
    let mut prev: HashMap<NodeIndex, usize> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = BTreeSet::from([start]);
    while let Some(n) = queue.pop_front() {
        if n == goal {
            break;
        }
        let mut edges: Vec<_> = graph.edges(n).collect();
        edges.sort_by_key(|e| *e.weight());
        for e in edges {
            let t = petgraph::visit::EdgeRef::target(&e);
            if component[t.index()] == comp && seen.insert(t) {
                prev.insert(t, *e.weight());
                queue.push_back(t);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = goal;
    while cur != start {
        let e = prev[&cur];
        path.push(deps[e].clone());
        cur = find(&deps[e].from);
    }
    path.reverse();
    let mut cycle = vec![d.clone()];
    cycle.extend(path);
    cycle
}

/// Per ground atom, the stratum of its leftmost predicate constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalStratification {
    strata: Vec<usize>,
    count: usize,
}

impl LocalStratification {
    pub fn stratum(&self, a: AtomId) -> usize {
        self.strata[a]
    }

    /// Number of strata to run the construction through.
    pub fn count(&self) -> usize {
        self.count
    }

    fn literal_stratum(&self, l: &GroundLiteral) -> usize {
        match *l {
            GroundLiteral::Pos(a) | GroundLiteral::Neg(a) => self.strata[a],
            GroundLiteral::Const(_) => 0,
        }
    }
}

/// Assigns strata to ground atoms and re-checks the local conditions.
pub fn localize(strat: &Stratification, gp: &GroundProgram) -> Result<LocalStratification, PerfectError> {
    let strata: Vec<usize> = gp
        .atoms()
        .iter()
        .map(|a| strat.stratum(a.predicate()).unwrap_or(1))
        .collect();
    let ls = LocalStratification { count: strata.iter().copied().max().unwrap_or(0), strata };
    for c in gp.clauses() {
        let h = ls.strata[c.head];
        for l in &c.body {
            let s = ls.literal_stratum(l);
            let ok = match l {
                GroundLiteral::Neg(_) => s < h,
                _ => s <= h,
            };
            if !ok {
                return Err(PerfectError::Violation { clause: gp.clause_to_string(c), literal: gp.literal_to_string(l) });
            }
        }
    }
    Ok(ls)
}

/// `Ψ_J(I)`: atoms with a clause whose every literal is true in `J` or is a
/// positive literal in `I`.
pub fn psi_step(j: &PartialInterpretation, i: &[bool], gp: &GroundProgram) -> Vec<bool> {
    (0..gp.atom_count())
        .map(|a| {
            gp.clauses_for(a).iter().any(|&ci| {
                gp.clauses()[ci].body.iter().all(|l| {
                    j.value_of_literal(l) == TruthValue::True || matches!(*l, GroundLiteral::Pos(b) if i[b])
                })
            })
        })
        .collect()
}

/// `Ψ_J↑ω` and the number of steps taken.
pub fn psi_lfp(j: &PartialInterpretation, gp: &GroundProgram) -> (Vec<bool>, usize) {
    let mut cur = vec![false; gp.atom_count()];
    let mut steps = 0;
    loop {
        let next = psi_step(j, &cur, gp);
        steps += 1;
        if next == cur {
            return (cur, steps);
        }
        cur = next;
    }
}

/// `N_0, ..., N_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectTrace {
    pub stages: Vec<PartialInterpretation>,
    pub inner_lengths: Vec<usize>,
}

impl PerfectTrace {
    pub fn strata_used(&self) -> usize {
        self.stages.len() - 1
    }
}

/// `N_{α+1} = ⟨Ψ_{N_α}↑ω, 𝓑_{α+1} − Ψ_{N_α}↑ω⟩`, where `𝓑_{α+1}` holds the
/// atoms of strata `1..=α+1`.
pub fn perfect_model(
    gp: &GroundProgram,
    ls: &LocalStratification,
) -> Result<(PartialInterpretation, PerfectTrace), PerfectError> {
    let n = gp.atom_count();
    let mut trace = PerfectTrace { stages: vec![PartialInterpretation::undefined(n)], inner_lengths: Vec::new() };
    for alpha in 0..ls.count() {
        let current = trace.stages.last().expect("non-empty");
        let (t, steps) = psi_lfp(current, gp);
        let values = (0..n)
            .map(|a| {
                if t[a] {
                    TruthValue::True
                } else if ls.stratum(a) <= alpha + 1 {
                    TruthValue::False
                } else {
                    TruthValue::Undefined
                }
            })
            .collect();
        let next = PartialInterpretation::from_values(values);
        if !leq(current, &next, Ordering::Fitting) {
            return Err(PerfectError::NotIncreasing { stage: alpha + 1 });
        }
        trace.inner_lengths.push(steps);
        trace.stages.push(next);
    }
    Ok((trace.stages.last().expect("non-empty").clone(), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::{ground_instantiation, Window};
    use crate::typecheck::load_program;
    use crate::wfs::well_founded_model;

    const STRATIFIED: &str = "type p : (i -> o) -> o. type q : i -> o. p Q <- ~(Q a). q X <- X = a.";
    const UNSTRATIFIED: &str =
        "type p : (i -> o) -> o. type q : i -> i -> o. p Q <- ~(Q a). q X Y <- X = a, Y = a, p (q a).";

    #[test]
    fn higher_order_stratification() {
        let s = stratify(&load_program(STRATIFIED).unwrap()).unwrap();
        assert_eq!(s.strata, vec![vec!["q".to_string()], vec!["p".to_string()]]);
    }

    #[test]
    fn unstratifiable_cycle_names_the_variable() {
        match stratify(&load_program(UNSTRATIFIED).unwrap()) {
            Err(PerfectError::Unstratifiable { cycle }) => {
                assert!(cycle[0].negative);
                assert_eq!((cycle[0].from.as_str(), cycle[0].to.as_str()), ("q", "p"));
                assert_eq!(cycle[0].via.as_deref(), Some("Q"));
                assert_eq!(cycle.last().unwrap().to, "q");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negation_free_is_one_stratum() {
        let p = load_program("type e : i -> i -> o. type r : i -> i -> o. e a b. r X Y <- e X Y. r X Y <- e X Z, r Z Y.")
            .unwrap();
        assert_eq!(stratify(&p).unwrap().len(), 1);
    }

    #[test]
    fn psi_steps() {
        let gp = ground_instantiation(&load_program("type p : o. type q : o. p <- q. q.").unwrap(), Window::new(1))
            .unwrap();
        let j = PartialInterpretation::undefined(2);
        let (p, q) = (gp.lookup("p").unwrap(), gp.lookup("q").unwrap());
        let one = psi_step(&j, &[false, false], &gp);
        assert!(one[q] && !one[p]);
        let two = psi_step(&j, &one, &gp);
        assert!(two[q] && two[p]);

        let gp = ground_instantiation(&load_program("type p : o. type q : o. p <- ~q.").unwrap(), Window::new(1))
            .unwrap();
        let mut j = PartialInterpretation::undefined(2);
        j.set(gp.lookup("q").unwrap(), TruthValue::False);
        assert!(psi_step(&j, &[false, false], &gp)[gp.lookup("p").unwrap()]);
    }

    #[test]
    fn two_strata_by_hand() {
        let p = load_program("type q : i -> o. type p : o. q X <- X = a. p <- ~(q b).").unwrap();
        let gp = ground_instantiation(&p, Window::new(1)).unwrap();
        let ls = localize(&stratify(&p).unwrap(), &gp).unwrap();
        let (m, trace) = perfect_model(&gp, &ls).unwrap();
        assert_eq!(m.value_of_key(&gp, "q a").unwrap(), TruthValue::True);
        assert_eq!(m.value_of_key(&gp, "q b").unwrap(), TruthValue::False);
        assert_eq!(m.value_of_key(&gp, "p").unwrap(), TruthValue::True);
        assert_eq!(trace.strata_used(), 2);
        assert_eq!(m, well_founded_model(&gp).0);
    }

    #[test]
    fn stratified_example_agrees_with_wfs() {
        let p = load_program(STRATIFIED).unwrap();
        for k in 1..=3 {
            let gp = ground_instantiation(&p, Window::new(k)).unwrap();
            let ls = localize(&stratify(&p).unwrap(), &gp).unwrap();
            assert_eq!(ls.stratum(gp.lookup("q a").unwrap()), 1);
            let (m, _) = perfect_model(&gp, &ls).unwrap();
            assert!(m.is_total());
            assert_eq!(m, well_founded_model(&gp).0);
        }
    }

    #[test]
    fn any_valid_stratification_gives_the_same_model() {
        let p = load_program(
            "type a0 : i -> o. type b0 : i -> o. type c0 : i -> o.
             a0 X <- X = a. b0 X <- ~(a0 X). c0 X <- b0 X, ~(a0 b).",
        )
        .unwrap();
        let gp = ground_instantiation(&p, Window::new(1)).unwrap();
        let least = stratify(&p).unwrap();
        let spread = Stratification::from_assignment(
            &p,
            [("a0", 2), ("b0", 4), ("c0", 5)].into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        )
        .unwrap();
        let m1 = perfect_model(&gp, &localize(&least, &gp).unwrap()).unwrap().0;
        let m2 = perfect_model(&gp, &localize(&spread, &gp).unwrap()).unwrap().0;
        assert_eq!(m1, m2);
        assert!(Stratification::from_assignment(&p, [("a0".to_string(), 3), ("b0".to_string(), 3)].into()).is_err());
    }
}
