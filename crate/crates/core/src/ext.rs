//! Extensional equality of ground terms under a model, at a depth bound.
//!
//! `d ≅_ι d'` is syntactic identity, `d ≅_o d'` compares truth values, and
//! `d ≅_{ρ→π} d'` holds when `d e ≅_π d' e'` for all `e ≅_ρ e'`. Unfolding
//! the arrows, `d ≅ d'` at `ρ1 → ... → ρn → o` compares `v(d e1 ... en)` with
//! `v(d' e1' ... en')` over all related argument pairs. Arguments come from
//! `U^k`, so a confirmed equality only holds at depth `k`.
//!
//! Values come from a model of a demand grounding rooted at every atom the
//! comparison needs. Atoms whose value depends on a truncated part of that
//! grounding make the comparison *unknown* rather than true or false.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::ast::{Expr, Type};
use crate::grounder::{GroundError, Grounder, UniverseIndex, Window};
use crate::interp::{PartialInterpretation, TruthValue};
use crate::perfect::{localize, perfect_model, stratify, PerfectError};
use crate::typecheck::Program;
use crate::wfs::well_founded_model;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ExtError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Perfect(#[from] PerfectError),
    #[error("`{0}` is not in the universe of its type at this depth")]
    NotInUniverse(String),
    #[error("comparison needs atoms beyond the grounding budget; unknown at this depth")]
    DepthExceeded,
}

/// Which model supplies the valuation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    #[default]
    WellFounded,
    Perfect,
}

/// Outcome of one comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ext {
    Equal,
    Different,
    Unknown,
}

/// A valuation computed on demand from a growing relevant grounding.
#[derive(Debug)]
pub struct DemandModel<'p> {
    grounder: Grounder<'p>,
    semantics: Semantics,
    model: PartialInterpretation,
    tainted: Vec<bool>,
}

impl<'p> DemandModel<'p> {
    pub fn new(program: &'p Program, window: Window, semantics: Semantics) -> Result<Self, ExtError> {
        Ok(DemandModel {
            grounder: Grounder::new(program, window)?,
            semantics,
            model: PartialInterpretation::undefined(0),
            tainted: Vec::new(),
        })
    }

    /// Grounds whatever `atoms` need and recomputes the model.
    pub fn ensure(&mut self, atoms: impl IntoIterator<Item = Expr>) -> Result<(), ExtError> {
        let missing: Vec<Expr> =
            atoms.into_iter().filter(|a| self.grounder.ground().id_of(a).is_none()).collect();
        if missing.is_empty() && self.model.len() == self.grounder.ground().atom_count() {
            return Ok(());
        }
        self.grounder.extend(missing)?;
        let gp = self.grounder.ground();
        self.model = match self.semantics {
            Semantics::WellFounded => well_founded_model(gp).0,
            Semantics::Perfect => {
                let strat = stratify(self.grounder.program())?;
                perfect_model(gp, &localize(&strat, gp)?)?.0
            }
        };
        self.tainted = gp.tainted();
        Ok(())
    }

    /// The value of a grounded atom, unless it depends on truncated atoms.
    pub fn value(&self, atom: &Expr) -> Option<TruthValue> {
        let id = self.grounder.ground().id_of(atom)?;
        if self.tainted[id] {
            None
        } else {
            Some(self.model.get(id))
        }
    }

    pub fn is_truncated(&self) -> bool {
        self.grounder.ground().is_truncated()
    }

    pub fn atom_count(&self) -> usize {
        self.grounder.ground().atom_count()
    }
}

/// `≅_ρ` restricted to `U^k_ρ`, as a matrix over the universe's order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtRelation {
    pub ty: Type,
    pub depth: usize,
    pub universe: Vec<Expr>,
    pub table: Vec<Vec<Ext>>,
}

impl ExtRelation {
    pub fn get(&self, i: usize, j: usize) -> Ext {
        self.table[i][j]
    }

    fn index_of(&self, e: &Expr) -> Option<usize> {
        self.universe.iter().position(|x| x == e)
    }

    /// Pairs not known to be unrelated, in canonical order.
    fn candidate_pairs(&self) -> Vec<(usize, usize, Ext)> {
        let mut out = Vec::new();
        for (i, row) in self.table.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                if r != Ext::Different {
                    out.push((i, j, r));
                }
            }
        }
        out
    }
}

/// A failed reflexivity test `E ≅ E`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(rename = "type")]
    pub ty: String,
    pub term: String,
    /// Related argument pairs `(e_i, e_i')`.
    pub args: Vec<(String, String)>,
    pub left_atom: String,
    pub right_atom: String,
    pub left_value: TruthValue,
    pub right_value: TruthValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnknownItem {
    #[serde(rename = "type")]
    pub ty: String,
    pub term: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// No failure among the terms and arguments up to the depth.
    #[serde(rename = "extensional-at-depth-k")]
    ExtensionalAtDepth,
    NonExtensional,
    /// No failure found, but some comparisons could not be decided.
    #[serde(rename = "unknown-at-depth-k")]
    UnknownAtDepth,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtReport {
    pub depth: usize,
    pub semantics: Semantics,
    pub verdict: Verdict,
    pub types: Vec<String>,
    pub checked: usize,
    pub witnesses: Vec<Witness>,
    pub unknown: Vec<UnknownItem>,
    pub truncated: bool,
}

/// Computes `≅` relations over one program and model.
#[derive(Debug)]
pub struct ExtChecker<'p> {
    program: &'p Program,
    depth: usize,
    universes: UniverseIndex,
    model: DemandModel<'p>,
    relations: HashMap<Type, ExtRelation>,
}

impl<'p> ExtChecker<'p> {
    pub fn new(program: &'p Program, window: Window, semantics: Semantics) -> Result<Self, ExtError> {
        Ok(ExtChecker {
            program,
            depth: window.depth,
            universes: UniverseIndex::new(program, window.depth)?,
            model: DemandModel::new(program, window, semantics)?,
            relations: HashMap::new(),
        })
    }

    pub fn model(&self) -> &DemandModel<'p> {
        &self.model
    }

    fn universe(&mut self, ty: &Type) -> Result<Vec<Expr>, ExtError> {
        Ok(self.universes.universe(ty)?)
    }

    /// All atoms `d e1 ... en` with `d` from `ds` and `ei` from `U^k`, plus
    /// whatever the argument relations need.
    fn needed_atoms(&mut self, ty: &Type, ds: &[Expr], out: &mut Vec<Expr>, seen: &mut BTreeSet<Type>) -> Result<(), ExtError> {
        let (params, _) = ty.uncurry();
        let params: Vec<Type> = params.into_iter().cloned().collect();
        if params.is_empty() {
            if *ty == Type::Omicron {
                out.extend(ds.iter().cloned());
            }
            return Ok(());
        }
        let mut pools = Vec::new();
        for p in &params {
            if !self.relations.contains_key(p) && seen.insert(p.clone()) {
                let u = self.universe(p)?;
                self.needed_atoms(p, &u, out, seen)?;
            }
            pools.push(self.universe(p)?);
        }
        for d in ds {
            product(&pools, &mut |args| {
                out.push(Expr::apply_all(d.clone(), args.iter().cloned()).expect("well-typed application"));
            });
        }
        Ok(())
    }

    fn prepare(&mut self, ty: &Type, ds: &[Expr]) -> Result<(), ExtError> {
        let mut atoms = Vec::new();
        self.needed_atoms(ty, ds, &mut atoms, &mut BTreeSet::new())?;
        self.model.ensure(atoms)
    }

    /// Grounds extra atoms along with those the comparisons need.
    pub fn add_roots(&mut self, roots: impl IntoIterator<Item = Expr>) -> Result<(), ExtError> {
        self.model.ensure(roots)
    }

    /// The full relation at `ty`.
    pub fn relation(&mut self, ty: &Type) -> Result<&ExtRelation, ExtError> {
        if !self.relations.contains_key(ty) {
            let universe = self.universe(ty)?;
            self.prepare(ty, &universe)?;
            let n = universe.len();
            let mut table = vec![vec![Ext::Unknown; n]; n];
            for i in 0..n {
                for j in 0..n {
                    table[i][j] = self.compare(ty, &universe[i], &universe[j])?.0;
                }
            }
            self.relations.insert(ty.clone(), ExtRelation { ty: ty.clone(), depth: self.depth, universe, table });
        }
        Ok(&self.relations[ty])
    }

    /// Compares two terms, assuming their atoms are grounded; on a definite
    /// difference also returns the first witnessing argument tuple.
    fn compare(&mut self, ty: &Type, d: &Expr, d2: &Expr) -> Result<(Ext, Option<Witness>), ExtError> {
        match ty {
            Type::Iota => return Ok((if d == d2 { Ext::Equal } else { Ext::Different }, None)),
            Type::Omicron => {
                if d == d2 {
                    return Ok((Ext::Equal, None));
                }
                return Ok(match (self.model.value(d), self.model.value(d2)) {
                    (Some(a), Some(b)) if a == b => (Ext::Equal, None),
                    (Some(_), Some(_)) => (Ext::Different, None),
                    _ => (Ext::Unknown, None),
                });
            }
            Type::Arrow(..) => {}
        }
        let (params, _) = ty.uncurry();
        let params: Vec<Type> = params.into_iter().cloned().collect();
        let mut pair_lists = Vec::new();
        for p in &params {
            let rel = self.relation(p)?;
            let pairs: Vec<(Expr, Expr, Ext)> = rel
                .candidate_pairs()
                .into_iter()
                .map(|(i, j, r)| (rel.universe[i].clone(), rel.universe[j].clone(), r))
                .collect();
            pair_lists.push(pairs);
        }
        let model = &self.model;
        let mut outcome = Ext::Equal;
        let mut witness = None;
        product(&pair_lists, &mut |tuple| {
            if outcome == Ext::Different {
                return;
            }
            let left = Expr::apply_all(d.clone(), tuple.iter().map(|t| t.0.clone())).expect("well-typed");
            let right = Expr::apply_all(d2.clone(), tuple.iter().map(|t| t.1.clone())).expect("well-typed");
            let sure = tuple.iter().all(|t| t.2 == Ext::Equal);
            match (model.value(&left), model.value(&right)) {
                (Some(a), Some(b)) if a == b => {}
                (Some(a), Some(b)) if sure => {
                    outcome = Ext::Different;
                    witness = Some(Witness {
                        ty: ty.to_string(),
                        term: d.to_string(),
                        args: tuple.iter().map(|t| (t.0.to_string(), t.1.to_string())).collect(),
                        left_atom: left.to_string(),
                        right_atom: right.to_string(),
                        left_value: a,
                        right_value: b,
                    });
                }
                _ => outcome = Ext::Unknown,
            }
        });
        Ok((outcome, witness))
    }

    /// `d ≅_ρ d'` at this depth.
    pub fn ext_equal(&mut self, ty: &Type, d: &Expr, d2: &Expr) -> Result<bool, ExtError> {
        let universe = self.universe(ty)?;
        for e in [d, d2] {
            if !universe.contains(e) {
                return Err(ExtError::NotInUniverse(e.to_string()));
            }
        }
        if let Some(rel) = self.relations.get(ty) {
            let (i, j) = (rel.index_of(d).expect("member"), rel.index_of(d2).expect("member"));
            return decide(rel.get(i, j));
        }
        self.prepare(ty, &[d.clone(), d2.clone()])?;
        decide(self.compare(ty, d, d2)?.0)
    }

    /// Tests `E ≅ E` for every `E` in the universe of every argument type of
    /// the signature.
    pub fn reflexivity_check(&mut self) -> Result<ExtReport, ExtError> {
        let types = argument_types(self.program);
        let mut report = ExtReport {
            depth: self.depth,
            semantics: self.model.semantics,
            verdict: Verdict::ExtensionalAtDepth,
            types: types.iter().map(Type::to_string).collect(),
            checked: 0,
            witnesses: Vec::new(),
            unknown: Vec::new(),
            truncated: false,
        };
        for ty in &types {
            let universe = self.universe(ty)?;
            report.checked += universe.len();
            if matches!(ty, Type::Iota | Type::Omicron) {
                continue;
            }
            self.prepare(ty, &universe)?;
            for e in &universe {
                match self.compare(ty, e, e)? {
                    (Ext::Equal, _) => {}
                    (Ext::Different, w) => report.witnesses.push(w.expect("difference has a witness")),
                    (Ext::Unknown, _) => report.unknown.push(UnknownItem { ty: ty.to_string(), term: e.to_string() }),
                }
            }
        }
        report.truncated = self.model.is_truncated();
        report.verdict = if !report.witnesses.is_empty() {
            Verdict::NonExtensional
        } else if !report.unknown.is_empty() {
            Verdict::UnknownAtDepth
        } else {
            Verdict::ExtensionalAtDepth
        };
        Ok(report)
    }
}

fn decide(e: Ext) -> Result<bool, ExtError> {
    match e {
        Ext::Equal => Ok(true),
        Ext::Different => Ok(false),
        Ext::Unknown => Err(ExtError::DepthExceeded),
    }
}

fn product<T: Clone>(pools: &[Vec<T>], f: &mut impl FnMut(&[T])) {
    fn go<T: Clone>(pools: &[Vec<T>], acc: &mut Vec<T>, f: &mut impl FnMut(&[T])) {
        match pools.split_first() {
            None => f(acc),
            Some((first, rest)) => {
                for x in first {
                    acc.push(x.clone());
                    go(rest, acc, f);
                    acc.pop();
                }
            }
        }
    }
    go(pools, &mut Vec::new(), f)
}

/// Argument types reachable from the signature: the types of predicate
/// constants, their partial applications and their parameters, plus `i` when
/// the program has individual terms. Simpler types come first.
pub fn argument_types(program: &Program) -> Vec<Type> {
    fn add(ty: &Type, out: &mut BTreeSet<(usize, String, Type)>) {
        if !ty.is_argument() || !out.insert((depth(ty), ty.to_string(), ty.clone())) {
            return;
        }
        if let Type::Arrow(a, r) = ty {
            add(a, out);
            add(r, out);
        }
    }
    fn depth(ty: &Type) -> usize {
        match ty {
            Type::Arrow(a, r) => 1 + depth(a).max(depth(r)),
            _ => 0,
        }
    }
    let sig = program.signature();
    let mut out = BTreeSet::new();
    for (_, ty) in sig.predicates() {
        add(ty, &mut out);
    }
    if sig.individuals().next().is_some() || sig.functions().next().is_some() {
        add(&Type::Iota, &mut out);
    }
    out.into_iter().map(|(_, _, t)| t).collect()
}

/// `d ≅_ρ d'` under the well-founded model at depth `k`.
pub fn ext_equal(program: &Program, ty: &Type, d: &Expr, d2: &Expr, window: Window) -> Result<bool, ExtError> {
    ExtChecker::new(program, window, Semantics::WellFounded)?.ext_equal(ty, d, d2)
}

pub fn reflexivity_check(program: &Program, window: Window, semantics: Semantics) -> Result<ExtReport, ExtError> {
    ExtChecker::new(program, window, semantics)?.reflexivity_check()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typecheck::load_program;

    const COUNTEREXAMPLE: &str = "type s : (o -> o) -> o. type p : o -> o. type q : o -> o. type w : o -> o.
        s Q <- Q (s Q). p R <- R. q R <- ~(w R). w R <- ~R.";

    fn pc(p: &Program, name: &str) -> Expr {
        Expr::constant(p.signature(), name).unwrap()
    }

    #[test]
    fn p_and_q_are_extensionally_equal() {
        let p = load_program(COUNTEREXAMPLE).unwrap();
        let oo = Type::arrow(Type::Omicron, Type::Omicron);
        assert!(ext_equal(&p, &oo, &pc(&p, "p"), &pc(&p, "q"), Window::new(3)).unwrap());
        assert!(!ext_equal(&p, &oo, &pc(&p, "p"), &pc(&p, "w"), Window::new(3)).unwrap());
        let s_ty = Type::arrow(oo, Type::Omicron);
        assert!(!ext_equal(&p, &s_ty, &pc(&p, "s"), &pc(&p, "s"), Window::new(3)).unwrap());
    }

    #[test]
    fn counterexample_is_not_extensional() {
        let p = load_program(COUNTEREXAMPLE).unwrap();
        let r = reflexivity_check(&p, Window::new(3), Semantics::WellFounded).unwrap();
        assert_eq!(r.verdict, Verdict::NonExtensional);
        assert_eq!(r.witnesses.len(), 1);
        let w = &r.witnesses[0];
        assert_eq!((w.ty.as_str(), w.term.as_str()), ("(o -> o) -> o", "s"));
        assert_eq!(w.args, vec![("p".to_string(), "q".to_string())]);
        assert_eq!((w.left_value, w.right_value), (TruthValue::False, TruthValue::Undefined));
    }

    #[test]
    fn individuals_compare_syntactically() {
        let p = load_program("type q : i -> o. q a. q b.").unwrap();
        let a = Expr::ind_const("a");
        assert!(ext_equal(&p, &Type::Iota, &a, &a, Window::new(1)).unwrap());
        assert!(!ext_equal(&p, &Type::Iota, &a, &Expr::ind_const("b"), Window::new(1)).unwrap());
    }

    #[test]
    fn stratified_example_is_extensional() {
        let p = load_program("type p : (i -> o) -> o. type q : i -> o. p Q <- ~(Q a). q X <- X = a.").unwrap();
        let r = reflexivity_check(&p, Window::new(3), Semantics::WellFounded).unwrap();
        assert_eq!(r.verdict, Verdict::ExtensionalAtDepth, "{r:?}");
        let r = reflexivity_check(&p, Window::new(3), Semantics::Perfect).unwrap();
        assert_eq!(r.verdict, Verdict::ExtensionalAtDepth);
    }

    #[test]
    fn constant_valuation_is_extensional() {
        let p = load_program("type p : o -> o. type r : o. p R <- R, ~R. r <- r.").unwrap();
        let r = reflexivity_check(&p, Window::new(3), Semantics::WellFounded).unwrap();
        assert_eq!(r.verdict, Verdict::ExtensionalAtDepth);
    }

    #[test]
    fn relations_are_partial_equivalences() {
        let p = load_program(COUNTEREXAMPLE).unwrap();
        let mut c = ExtChecker::new(&p, Window::new(3), Semantics::WellFounded).unwrap();
        for ty in [Type::Omicron, Type::arrow(Type::Omicron, Type::Omicron)] {
            let rel = c.relation(&ty).unwrap().clone();
            let n = rel.universe.len();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(rel.get(i, j), rel.get(j, i));
                    for k in 0..n {
                        if rel.get(i, j) == Ext::Equal && rel.get(j, k) == Ext::Equal {
                            assert_eq!(rel.get(i, k), Ext::Equal);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn runaway_grounding_gives_unknown() {
        let p = load_program("type f : i -> i. type r : i -> o. type h : (i -> o) -> o. r X <- r (f X). h Q <- Q a.")
            .unwrap();
        let r = reflexivity_check(&p, Window::new(2).with_atom_budget(5), Semantics::WellFounded).unwrap();
        assert!(r.truncated);
        assert_eq!(r.verdict, Verdict::UnknownAtDepth);
        assert!(r.witnesses.is_empty());
    }
}
