//! Elaboration of parsed programs into checked [`Program`]s.
//!
//! Checks the clause shape `p V1 ... Vn <- L1, ..., Lm` where every argument
//! of predicate type in a head is a variable and no such variable repeats.
//! Individual (`i`) arguments in heads may be arbitrary terms and may repeat;
//! they are rewritten into a fresh formal plus a leading equality literal, so
//! `q a.` becomes `q X1 <- X1 = a.`. Variable types are inferred by
//! unification over the clause.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ast::{elaborate, is_variable_name, AstError, Clause, Name, Pos, RawExpr, RawKind, Signature, SymbolKind, Type, Var};
use crate::parser::{RawClause, SourceProgram};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("{pos}: head argument `{arg}` of `{predicate}` is {} and must be a variable", describe_arg(.ty))]
    NonVariableHeadArgument { predicate: String, arg: String, ty: Option<Type>, pos: Pos },
    #[error("{pos}: predicate variable `{var}` occurs more than once in the head of `{predicate}`")]
    RepeatedHeadVariable { predicate: String, var: String, pos: Pos },
    #[error("{pos}: `{predicate}` has {expected} parameters but the head gives {found}")]
    ArityMismatch { predicate: String, expected: usize, found: usize, pos: Pos },
    #[error("{pos}: the type of variable `{var}` is not determined by the clause")]
    AmbiguousVariableType { var: String, pos: Pos },
    #[error("conflicting types for variable `{var}`: {}", fmt_occurrences(.occurrences))]
    ConflictingVariableType { var: String, occurrences: Vec<(Pos, Type)> },
    #[error("{pos}: clause head must be a declared predicate constant applied to arguments: {message}")]
    InvalidHead { message: String, pos: Pos },
    #[error("{pos}: `{name}` is applied to arguments but has no type declaration")]
    UndeclaredSymbol { name: String, pos: Pos },
    #[error("{pos}: `{name}` is declared with type {ty}, which is not an individual, function or predicate type")]
    InvalidDeclaration { name: String, ty: Type, pos: Pos },
    #[error("{pos}: ill-typed: {message}")]
    IllTyped { message: String, pos: Pos },
}

fn describe_arg(ty: &Option<Type>) -> String {
    match ty {
        Some(t) => format!("of predicate type {t}"),
        None => "a predicate constant".to_string(),
    }
}

fn fmt_occurrences(occ: &[(Pos, Type)]) -> String {
    occ.iter().map(|(p, t)| format!("{t} at {p}")).collect::<Vec<_>>().join(", ")
}

impl CheckError {
    /// Name of the violated rule.
    pub fn rule(&self) -> &'static str {
        match self {
            CheckError::NonVariableHeadArgument { .. } => "NonVariableHeadArgument",
            CheckError::RepeatedHeadVariable { .. } => "RepeatedHeadVariable",
            CheckError::ArityMismatch { .. } => "ArityMismatch",
            CheckError::AmbiguousVariableType { .. } => "AmbiguousVariableType",
            CheckError::ConflictingVariableType { .. } => "ConflictingVariableType",
            CheckError::InvalidHead { .. } => "InvalidHead",
            CheckError::UndeclaredSymbol { .. } => "UndeclaredSymbol",
            CheckError::InvalidDeclaration { .. } => "InvalidDeclaration",
            CheckError::IllTyped { .. } => "IllTyped",
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            CheckError::ConflictingVariableType { occurrences, .. } => {
                occurrences.first().map(|(p, _)| *p).unwrap_or_default()
            }
            CheckError::NonVariableHeadArgument { pos, .. }
            | CheckError::RepeatedHeadVariable { pos, .. }
            | CheckError::ArityMismatch { pos, .. }
            | CheckError::AmbiguousVariableType { pos, .. }
            | CheckError::InvalidHead { pos, .. }
            | CheckError::UndeclaredSymbol { pos, .. }
            | CheckError::InvalidDeclaration { pos, .. }
            | CheckError::IllTyped { pos, .. } => *pos,
        }
    }
}

impl From<AstError> for CheckError {
    fn from(e: AstError) -> Self {
        let pos = match &e {
            AstError::UnboundSymbol { pos, .. }
            | AstError::IllTypedApplication { pos, .. }
            | AstError::FunctionArity { pos, .. }
            | AstError::NegOfNonBoolean { pos, .. }
            | AstError::EqOfNonIndividual { pos, .. }
            | AstError::MisplacedLiteral { pos } => *pos,
            _ => Pos::default(),
        };
        CheckError::IllTyped { message: e.to_string(), pos }
    }
}

/// All problems found in a program, in source order.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct CheckErrors(pub Vec<CheckError>);

impl fmt::Display for CheckErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A checked program: signature plus well-formed clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    signature: Signature,
    clauses: Vec<Clause>,
    index: BTreeMap<Name, Vec<usize>>,
}

impl Program {
    /// Assembles a program from already-checked parts.
    pub fn new(signature: Signature, clauses: Vec<Clause>) -> Self {
        let mut index: BTreeMap<Name, Vec<usize>> = BTreeMap::new();
        for (i, c) in clauses.iter().enumerate() {
            index.entry(c.head.clone()).or_default().push(i);
        }
        Program { signature, clauses, index }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Indices of the clauses defining `predicate`.
    pub fn clauses_for(&self, predicate: &str) -> &[usize] {
        self.index.get(predicate).map(Vec::as_slice).unwrap_or(&[])
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, ty) in self.signature.iter() {
            writeln!(f, "type {name} : {ty}.")?;
        }
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Parses and checks program text in one go.
pub fn load_program(text: &str) -> Result<Program, crate::Error> {
    let sp = crate::parser::parse_program(text)?;
    Ok(check_program(&sp)?)
}

/// Parses a comma-separated list of ground atoms against a program's
/// signature, e.g. roots for demand grounding.
pub fn parse_atoms(program: &Program, text: &str) -> Result<Vec<crate::ast::Expr>, crate::Error> {
    let mut out = Vec::new();
    for raw in crate::parser::parse_atom_list(text)? {
        let e = elaborate(&raw, program.signature(), &BTreeMap::new())?;
        if !e.is_atom() || !e.is_ground() {
            return Err(AstError::MisplacedLiteral { pos: raw.pos }.into());
        }
        out.push(e);
    }
    Ok(out)
}

/// Checks a parsed program, collecting every error found.
pub fn check_program(sp: &SourceProgram) -> Result<Program, CheckErrors> {
    let mut errors = Vec::new();
    let mut sig = Signature::new();
    for d in &sp.declarations {
        if sig.declare(d.name.as_str(), d.ty.clone()).is_err() {
            errors.push(CheckError::InvalidDeclaration { name: d.name.clone(), ty: d.ty.clone(), pos: d.pos });
        }
    }

    // A symbol heading a clause is a predicate constant even when its
    // declaration is missing, so it may not appear as a head argument.
    let heads: BTreeSet<&str> = sp
        .clauses
        .iter()
        .filter_map(|c| match &c.head.spine().0.kind {
            RawKind::Name(n) if !is_variable_name(n) => Some(n.as_str()),
            _ => None,
        })
        .collect();
    for c in &sp.clauses {
        let (head, args) = c.head.spine();
        let RawKind::Name(predicate) = &head.kind else { continue };
        for a in args {
            if let RawKind::Name(n) = &a.kind {
                if heads.contains(n.as_str()) && !sig.contains(n) {
                    errors.push(CheckError::NonVariableHeadArgument {
                        predicate: predicate.clone(),
                        arg: n.clone(),
                        ty: None,
                        pos: a.pos,
                    });
                }
            }
        }
    }

    // Undeclared lowercase symbols: nullary ones become individual constants,
    // applied ones are errors.
    let mut implicit: BTreeSet<String> = BTreeSet::new();
    for c in &sp.clauses {
        std::iter::once(&c.head).chain(&c.body).for_each(|e| {
            scan_symbols(e, &mut |name, nargs, pos| {
                if is_variable_name(name) || sig.contains(name) {
                    return;
                }
                if nargs > 0 {
                    errors.push(CheckError::UndeclaredSymbol { name: name.to_string(), pos });
                } else {
                    implicit.insert(name.to_string());
                }
            })
        });
    }
    for name in implicit {
        sig.declare(name.as_str(), Type::Iota).expect("i is a valid type");
    }

    let mut clauses = Vec::with_capacity(sp.clauses.len());
    for c in &sp.clauses {
        match check_clause(c, &sig) {
            Ok(clause) => clauses.push(clause),
            Err(mut errs) => errors.append(&mut errs),
        }
    }
    if errors.is_empty() {
        Ok(Program::new(sig, clauses))
    } else {
        Err(CheckErrors(errors))
    }
}

fn scan_symbols<'a>(e: &'a RawExpr, f: &mut impl FnMut(&'a str, usize, Pos)) {
    match &e.kind {
        RawKind::Name(n) => f(n, 0, e.pos),
        RawKind::App(..) => {
            let (head, args) = e.spine();
            match &head.kind {
                RawKind::Name(n) => f(n, args.len(), head.pos),
                _ => scan_symbols(head, f),
            }
            for a in args {
                scan_symbols(a, f);
            }
        }
        RawKind::Neg(a) => scan_symbols(a, f),
        RawKind::Eq(a, b) => {
            scan_symbols(a, f);
            scan_symbols(b, f);
        }
    }
}

/// A clause with its head split into formals, with individual head arguments
/// already rewritten into equalities.
struct Normalized {
    head: Name,
    head_ty: Type,
    formals: Vec<(Var, Pos)>,
    body: Vec<RawExpr>,
}

fn normalize(c: &RawClause, sig: &Signature) -> Result<Normalized, Vec<CheckError>> {
    let (head, args) = c.head.spine();
    let name = match &head.kind {
        RawKind::Name(n) => n,
        _ => {
            return Err(vec![CheckError::InvalidHead { message: "negation or equality in head".into(), pos: c.head.pos }])
        }
    };
    let head_ty = match sig.kind(name) {
        Some(SymbolKind::Predicate) => sig.get(name).cloned().expect("declared"),
        _ if is_variable_name(name) => {
            return Err(vec![CheckError::InvalidHead {
                message: format!("`{name}` is a variable"),
                pos: head.pos,
            }])
        }
        _ => {
            return Err(vec![CheckError::InvalidHead {
                message: format!("`{name}` is not a predicate constant"),
                pos: head.pos,
            }])
        }
    };
    let (params, _) = head_ty.uncurry();
    if params.len() != args.len() {
        return Err(vec![CheckError::ArityMismatch {
            predicate: name.clone(),
            expected: params.len(),
            found: args.len(),
            pos: c.head.pos,
        }]);
    }

    let mut used: BTreeSet<String> = BTreeSet::new();
    std::iter::once(&c.head).chain(&c.body).for_each(|e| {
        e.for_each_name(&mut |n, _| {
            if is_variable_name(n) {
                used.insert(n.to_string());
            }
        })
    });
    let mut fresh_counter = 0usize;
    let mut fresh = |used: &mut BTreeSet<String>| loop {
        fresh_counter += 1;
        let cand = format!("X{fresh_counter}");
        if !used.contains(&cand) {
            used.insert(cand.clone());
            return cand;
        }
    };

    let mut errors = Vec::new();
    let mut formals: Vec<(Var, Pos)> = Vec::new();
    let mut equalities = Vec::new();
    for (arg, param) in args.iter().zip(params) {
        let as_var = match &arg.kind {
            RawKind::Name(n) if is_variable_name(n) => Some(n.as_str()),
            _ => None,
        };
        let repeated = as_var.is_some_and(|v| formals.iter().any(|(f, _)| &*f.name == v));
        match (as_var, repeated) {
            (Some(v), false) => formals.push((Var::new(v, param.clone()), arg.pos)),
            _ if *param != Type::Iota => {
                if let Some(v) = as_var {
                    errors.push(CheckError::RepeatedHeadVariable {
                        predicate: name.clone(),
                        var: v.to_string(),
                        pos: arg.pos,
                    });
                } else {
                    errors.push(CheckError::NonVariableHeadArgument {
                        predicate: name.clone(),
                        arg: raw_to_string(arg),
                        ty: Some(param.clone()),
                        pos: arg.pos,
                    });
                }
            }
            _ => {
                let v = fresh(&mut used);
                formals.push((Var::new(v.as_str(), Type::Iota), arg.pos));
                equalities.push(RawExpr {
                    kind: RawKind::Eq(Box::new(RawExpr::name(v, arg.pos)), Box::new((*arg).clone())),
                    pos: arg.pos,
                });
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    equalities.extend(c.body.iter().cloned());
    Ok(Normalized { head: name.as_str().into(), head_ty, formals, body: equalities })
}

fn raw_to_string(e: &RawExpr) -> String {
    fn go(e: &RawExpr, operand: bool, out: &mut String) {
        match &e.kind {
            RawKind::Name(n) => out.push_str(n),
            RawKind::App(a, b) => {
                if operand {
                    out.push('(');
                }
                go(a, false, out);
                out.push(' ');
                go(b, true, out);
                if operand {
                    out.push(')');
                }
            }
            RawKind::Neg(a) => {
                out.push('~');
                go(a, true, out);
            }
            RawKind::Eq(a, b) => {
                go(a, false, out);
                out.push_str(" = ");
                go(b, false, out);
            }
        }
    }
    let mut s = String::new();
    go(e, false, &mut s);
    s
}

fn check_clause(c: &RawClause, sig: &Signature) -> Result<Clause, Vec<CheckError>> {
    let norm = normalize(c, sig)?;
    let env = infer_normalized(&norm, sig)?;
    let mut errors = Vec::new();
    let mut body = Vec::with_capacity(norm.body.len());
    for lit in &norm.body {
        match elaborate(lit, sig, &env) {
            Ok(e) if *e.ty() == Type::Omicron => body.push(e),
            Ok(e) => errors.push(CheckError::IllTyped {
                message: format!("body literal `{e}` has type {}, expected o", e.ty()),
                pos: lit.pos,
            }),
            Err(e) => errors.push(e.into()),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(Clause {
        head: norm.head,
        head_ty: norm.head_ty,
        formals: norm.formals.into_iter().map(|(v, _)| v).collect(),
        body,
    })
}

/// Infers the type of every variable of a clause. Formals take their types
/// from the head predicate's declaration.
pub fn infer_var_types(c: &RawClause, sig: &Signature) -> Result<BTreeMap<Name, Type>, Vec<CheckError>> {
    let norm = normalize(c, sig)?;
    infer_normalized(&norm, sig)
}

/***** Unification *****/

#[derive(Clone, Debug, PartialEq, Eq)]
enum TyTerm {
    Meta(usize),
    Iota,
    Omicron,
    Arrow(Box<TyTerm>, Box<TyTerm>),
}

impl TyTerm {
    fn from_type(t: &Type) -> TyTerm {
        match t {
            Type::Iota => TyTerm::Iota,
            Type::Omicron => TyTerm::Omicron,
            Type::Arrow(a, r) => TyTerm::Arrow(Box::new(TyTerm::from_type(a)), Box::new(TyTerm::from_type(r))),
        }
    }
}

#[derive(Default)]
struct Unifier {
    bindings: Vec<Option<TyTerm>>,
}

impl Unifier {
    fn fresh(&mut self) -> TyTerm {
        self.bindings.push(None);
        TyTerm::Meta(self.bindings.len() - 1)
    }

    fn shallow(&self, t: &TyTerm) -> TyTerm {
        let mut cur = t.clone();
        while let TyTerm::Meta(m) = cur {
            match &self.bindings[m] {
                Some(b) => cur = b.clone(),
                None => return cur,
            }
        }
        cur
    }

    fn occurs(&self, m: usize, t: &TyTerm) -> bool {
        match self.shallow(t) {
            TyTerm::Meta(n) => n == m,
            TyTerm::Arrow(a, r) => self.occurs(m, &a) || self.occurs(m, &r),
            _ => false,
        }
    }

    fn unify(&mut self, a: &TyTerm, b: &TyTerm) -> bool {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (TyTerm::Meta(x), TyTerm::Meta(y)) if x == y => true,
            (TyTerm::Meta(x), other) | (other, TyTerm::Meta(x)) => {
                if self.occurs(*x, other) {
                    return false;
                }
                self.bindings[*x] = Some(other.clone());
                true
            }
            (TyTerm::Iota, TyTerm::Iota) | (TyTerm::Omicron, TyTerm::Omicron) => true,
            (TyTerm::Arrow(a1, r1), TyTerm::Arrow(a2, r2)) => self.unify(a1, a2) && self.unify(r1, r2),
            _ => false,
        }
    }

    fn resolve(&self, t: &TyTerm) -> Option<Type> {
        match self.shallow(t) {
            TyTerm::Meta(_) => None,
            TyTerm::Iota => Some(Type::Iota),
            TyTerm::Omicron => Some(Type::Omicron),
            TyTerm::Arrow(a, r) => Some(Type::arrow(self.resolve(&a)?, self.resolve(&r)?)),
        }
    }
}

struct Inference<'a> {
    sig: &'a Signature,
    unifier: Unifier,
    vars: BTreeMap<String, (TyTerm, Pos)>,
    /// Per variable occurrence: the type its immediate context demands, when
    /// that context is a constant or an equality.
    demands: BTreeMap<String, Vec<(Pos, Type)>>,
    failures: Vec<(String, Pos)>,
}

impl<'a> Inference<'a> {
    fn var(&mut self, name: &str, pos: Pos) -> TyTerm {
        if let Some((t, _)) = self.vars.get(name) {
            return t.clone();
        }
        let t = self.unifier.fresh();
        self.vars.insert(name.to_string(), (t.clone(), pos));
        t
    }

    fn demand(&mut self, e: &RawExpr, ty: &Type) {
        if let RawKind::Name(n) = &e.kind {
            if is_variable_name(n) {
                self.demands.entry(n.clone()).or_default().push((e.pos, ty.clone()));
            }
        }
    }

    fn expect(&mut self, e: &RawExpr, got: &TyTerm, want: &TyTerm) {
        if !self.unifier.unify(got, want) {
            self.failures.push((raw_to_string(e), e.pos));
        }
    }

    fn term(&mut self, e: &RawExpr) -> TyTerm {
        match &e.kind {
            RawKind::Name(n) => {
                if is_variable_name(n) {
                    self.var(n, e.pos)
                } else {
                    match self.sig.get(n) {
                        Some(t) => TyTerm::from_type(t),
                        None => self.unifier.fresh(),
                    }
                }
            }
            RawKind::App(..) => {
                let (head, args) = e.spine();
                if let RawKind::Name(n) = &head.kind {
                    if let Some(SymbolKind::Function { arity }) = self.sig.kind(n) {
                        for a in &args {
                            self.demand(a, &Type::Iota);
                            let t = self.term(a);
                            self.expect(a, &t, &TyTerm::Iota);
                        }
                        if args.len() != arity {
                            self.failures.push((raw_to_string(e), e.pos));
                        }
                        return TyTerm::Iota;
                    }
                    if let Some(ty) = self.sig.get(n) {
                        let (params, _) = ty.uncurry();
                        for (a, p) in args.iter().zip(params) {
                            self.demand(a, p);
                        }
                    }
                }
                let mut acc = self.term(head);
                for a in args {
                    let at = self.term(a);
                    let res = self.unifier.fresh();
                    let want = TyTerm::Arrow(Box::new(at), Box::new(res.clone()));
                    self.expect(e, &acc, &want);
                    acc = res;
                }
                acc
            }
            RawKind::Neg(_) | RawKind::Eq(..) => {
                self.failures.push((raw_to_string(e), e.pos));
                self.unifier.fresh()
            }
        }
    }

    fn literal(&mut self, e: &RawExpr) {
        match &e.kind {
            RawKind::Neg(a) => {
                self.demand(a, &Type::Omicron);
                let t = self.term(a);
                self.expect(a, &t, &TyTerm::Omicron);
            }
            RawKind::Eq(l, r) => {
                for side in [l, r] {
                    self.demand(side, &Type::Iota);
                    let t = self.term(side);
                    self.expect(side, &t, &TyTerm::Iota);
                }
            }
            _ => {
                self.demand(e, &Type::Omicron);
                let t = self.term(e);
                self.expect(e, &t, &TyTerm::Omicron);
            }
        }
    }
}

fn infer_normalized(norm: &Normalized, sig: &Signature) -> Result<BTreeMap<Name, Type>, Vec<CheckError>> {
    let mut inf = Inference {
        sig,
        unifier: Unifier::default(),
        vars: BTreeMap::new(),
        demands: BTreeMap::new(),
        failures: Vec::new(),
    };
    for (v, pos) in &norm.formals {
        let t = TyTerm::from_type(&v.ty);
        inf.vars.insert(v.name.to_string(), (t, *pos));
        inf.demands.entry(v.name.to_string()).or_default().push((*pos, v.ty.clone()));
    }
    for lit in &norm.body {
        inf.literal(lit);
    }

    let mut errors = Vec::new();
    if !inf.failures.is_empty() {
        for (var, occ) in &inf.demands {
            let distinct: BTreeSet<&Type> = occ.iter().map(|(_, t)| t).collect();
            if distinct.len() > 1 {
                errors.push(CheckError::ConflictingVariableType { var: var.clone(), occurrences: occ.clone() });
            }
        }
        if errors.is_empty() {
            for (text, pos) in &inf.failures {
                errors.push(CheckError::IllTyped { message: format!("cannot type `{text}`"), pos: *pos });
            }
        }
        return Err(errors);
    }

    let mut env = BTreeMap::new();
    for (name, (t, pos)) in &inf.vars {
        match inf.unifier.resolve(t) {
            None => errors.push(CheckError::AmbiguousVariableType { var: name.clone(), pos: *pos }),
            Some(ty) if !ty.is_argument() => errors.push(CheckError::IllTyped {
                message: format!("variable `{name}` would have type {ty}, which is not an argument type"),
                pos: *pos,
            }),
            Some(ty) => {
                env.insert(Name::from(name.as_str()), ty);
            }
        }
    }
    if errors.is_empty() {
        Ok(env)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn check(text: &str) -> Result<Program, CheckErrors> {
        check_program(&parse_program(text).unwrap())
    }

    fn rules(text: &str) -> Vec<&'static str> {
        check(text).unwrap_err().0.iter().map(CheckError::rule).collect()
    }

    #[test]
    fn undeclared_predicate_in_head_is_still_rejected() {
        let errs = check("q a. r q.").unwrap_err();
        let rules: Vec<_> = errs.0.iter().map(|e| e.rule()).collect();
        assert_eq!(rules[0], "NonVariableHeadArgument");
        assert_eq!(errs.0[0].pos(), Pos { line: 1, column: 8 });
        assert!(errs.0[0].to_string().contains("a predicate constant"));
    }

    #[test]
    fn predicate_constant_in_head_is_rejected() {
        let errs = check("type q : i -> o. type r : (i -> o) -> o. q a. r q.").unwrap_err();
        assert_eq!(errs.0.len(), 1);
        match &errs.0[0] {
            CheckError::NonVariableHeadArgument { predicate, arg, .. } => {
                assert_eq!(predicate, "r");
                assert_eq!(arg, "q");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn repeated_predicate_variable_is_rejected() {
        assert_eq!(rules("type p : (i -> o) -> (i -> o) -> o. p Q Q <- Q a."), vec!["RepeatedHeadVariable"]);
    }

    #[test]
    fn union_is_accepted() {
        let p = check(
            "type union : (i -> o) -> (i -> o) -> i -> o.
             union P Q X <- P X.
             union P Q X <- Q X.",
        )
        .unwrap();
        assert_eq!(p.clauses().len(), 2);
        assert_eq!(p.clauses_for("union"), &[0, 1]);
    }

    #[test]
    fn individual_head_arguments_become_equalities() {
        let p = check("type q : i -> o. q a. q b.").unwrap();
        assert_eq!(p.clauses()[0].to_string(), "q X1 <- X1 = a.");
        let p = check("type e : i -> i -> o. e X X.").unwrap();
        assert_eq!(p.clauses()[0].to_string(), "e X X1 <- X1 = X.");
    }

    #[test]
    fn arity_and_head_errors() {
        assert_eq!(rules("type p : i -> o. p a b."), vec!["ArityMismatch"]);
        assert_eq!(rules("Q a."), vec!["InvalidHead"]);
        assert_eq!(rules("p."), vec!["InvalidHead"]);
        assert_eq!(rules("f a <- f a."), vec!["UndeclaredSymbol", "UndeclaredSymbol", "InvalidHead"]);
    }

    #[test]
    fn ambiguous_variable() {
        assert_eq!(rules("type p : o. p <- Q R."), vec!["AmbiguousVariableType", "AmbiguousVariableType"]);
    }

    #[test]
    fn conflicting_variable_reports_every_occurrence() {
        let errs = check("type p : i -> o. type r : o -> o. p X <- r X.").unwrap_err();
        match &errs.0[0] {
            CheckError::ConflictingVariableType { var, occurrences } => {
                assert_eq!(var, "X");
                assert_eq!(occurrences.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn variable_types_are_inferred() {
        let sp = parse_program(
            "type s : (o -> o) -> o. type q : i -> o. type w : o -> o.
             s Q <- Q (s Q).
             q X <- X = a.
             w R <- ~R.",
        )
        .unwrap();
        let mut sig = Signature::new();
        for d in &sp.declarations {
            sig.declare(d.name.as_str(), d.ty.clone()).unwrap();
        }
        sig.declare("a", Type::Iota).unwrap();
        let oo = Type::arrow(Type::Omicron, Type::Omicron);
        assert_eq!(infer_var_types(&sp.clauses[0], &sig).unwrap()["Q"], oo);
        assert_eq!(infer_var_types(&sp.clauses[1], &sig).unwrap()["X"], Type::Iota);
        assert_eq!(infer_var_types(&sp.clauses[2], &sig).unwrap()["R"], Type::Omicron);
    }

    #[test]
    fn body_only_variables_are_inferred() {
        let p = check(
            "type subset : (i -> o) -> (i -> o) -> o.
             type nonsubset : (i -> o) -> (i -> o) -> o.
             subset S1 S2 <- ~(nonsubset S1 S2).
             nonsubset S1 S2 <- S1 X, ~(S2 X).",
        )
        .unwrap();
        let local = p.clauses()[1].local_vars();
        assert_eq!(local.into_iter().collect::<Vec<_>>(), vec![Var::new("X", Type::Iota)]);
    }

    #[test]
    fn function_symbols() {
        let p = check("type f : i -> i. type nat : i -> o. nat z. nat (f X) <- nat X.").unwrap();
        assert_eq!(p.clauses()[1].to_string(), "nat X1 <- X1 = f X, nat X.");
        assert_eq!(rules("type f : i -> i -> i. type n : i -> o. n X <- n (f X)."), vec!["IllTyped"]);
    }

    #[test]
    fn non_argument_variable_types_are_rejected() {
        // Q would need type i -> i
        assert_eq!(rules("type p : o. type r : i -> o. p <- r (Q a)."), vec!["IllTyped"]);
    }

    #[test]
    fn invalid_declarations() {
        assert_eq!(rules("type f : (i -> i) -> o."), vec!["InvalidDeclaration"]);
    }

    #[test]
    fn rechecking_the_printed_program_is_idempotent() {
        let p = check(
            "type s : (o -> o) -> o. type p : o -> o. type q : o -> o. type w : o -> o.
             s Q <- Q (s Q). p R <- R. q R <- ~(w R). w R <- ~R.",
        )
        .unwrap();
        let again = check(&p.to_string()).unwrap();
        assert_eq!(p, again);
    }
}
