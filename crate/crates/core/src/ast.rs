//! Typed abstract syntax for higher-order programs.
//!
//! Types come in three flavours: individual (`i`), function (`i -> ... -> i`)
//! and predicate (`r1 -> ... -> rn -> o`, where each `rk` is `i` or a
//! predicate type). Expressions are applicative terms over constants and
//! variables, plus the two literal-only forms `~A` and `t1 = t2`.
//!
//! Every [`Expr`] carries its type, computed once when the node is built, so
//! grounding never has to re-infer anything. Nodes are reference counted and
//! immutable, which makes them cheap to clone and safe to share.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Symbol and variable names.
pub type Name = Arc<str>;

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/***** Types *****/

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    /// The type of individuals.
    Iota,
    /// The type of truth values.
    Omicron,
    Arrow(Arc<Type>, Arc<Type>),
}

/// The three disjoint classes a well-formed type falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeClass {
    /// `i`
    Individual,
    /// `i -> ... -> i` with at least one argument.
    Function,
    /// `r1 -> ... -> rn -> o`
    Predicate,
}

impl Type {
    pub fn arrow(arg: Type, result: Type) -> Type {
        Type::Arrow(Arc::new(arg), Arc::new(result))
    }

    /// Builds `args[0] -> ... -> args[n-1] -> result`.
    pub fn curried(args: impl IntoIterator<Item = Type>, result: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |acc, a| Type::arrow(a, acc))
    }

    /// `i^n -> i`, the type of an `n`-ary function symbol.
    pub fn function(arity: usize) -> Type {
        Type::curried(std::iter::repeat(Type::Iota).take(arity), Type::Iota)
    }

    pub fn is_functional(&self) -> bool {
        match self {
            Type::Iota => true,
            Type::Omicron => false,
            Type::Arrow(a, r) => **a == Type::Iota && r.is_functional(),
        }
    }

    pub fn is_predicate(&self) -> bool {
        match self {
            Type::Iota => false,
            Type::Omicron => true,
            Type::Arrow(a, r) => a.is_argument() && r.is_predicate(),
        }
    }

    pub fn is_argument(&self) -> bool {
        *self == Type::Iota || self.is_predicate()
    }

    pub fn class(&self) -> Option<TypeClass> {
        if *self == Type::Iota {
            Some(TypeClass::Individual)
        } else if self.is_functional() {
            Some(TypeClass::Function)
        } else if self.is_predicate() {
            Some(TypeClass::Predicate)
        } else {
            None
        }
    }

    /// Splits `r1 -> ... -> rn -> t` (with `t` not an arrow) into its
    /// argument types and final result.
    pub fn uncurry(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Type::Arrow(a, r) = cur {
            args.push(&**a);
            cur = r;
        }
        (args, cur)
    }

    pub fn arity(&self) -> usize {
        self.uncurry().0.len()
    }

    /// The result chain `self`, `result(self)`, ... down to the base type.
    pub fn result_chain(&self) -> impl Iterator<Item = &Type> {
        std::iter::successors(Some(self), |t| match t {
            Type::Arrow(_, r) => Some(&**r),
            _ => None,
        })
    }

    /// `self` is greater than or equal to `other`: either equal, or of the form
    /// `r1 -> ... -> rn -> other` with `n >= 1`.
    pub fn is_at_least(&self, other: &Type) -> bool {
        self.result_chain().any(|t| t == other)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Iota => write!(f, "i"),
            Type::Omicron => write!(f, "o"),
            Type::Arrow(a, r) => {
                if matches!(**a, Type::Arrow(..)) {
                    write!(f, "({a}) -> {r}")
                } else {
                    write!(f, "{a} -> {r}")
                }
            }
        }
    }
}

/***** Errors *****/

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AstError {
    #[error("{pos}: unbound symbol `{name}`")]
    UnboundSymbol { name: String, pos: Pos },
    #[error("{pos}: ill-typed application: `{operator}` of type {operator_ty} cannot take an argument of type {operand_ty}")]
    IllTypedApplication { operator: String, operator_ty: Type, operand_ty: Type, pos: Pos },
    #[error("{pos}: function symbol `{name}` expects {expected} arguments, got {found}")]
    FunctionArity { name: String, expected: usize, found: usize, pos: Pos },
    #[error("{pos}: negation applied to an expression of type {found}, expected o")]
    NegOfNonBoolean { found: Type, pos: Pos },
    #[error("{pos}: equality between expressions of type {left} and {right}, expected i")]
    EqOfNonIndividual { left: Type, right: Type, pos: Pos },
    #[error("{pos}: `~` and `=` may only appear at the top of a body literal")]
    MisplacedLiteral { pos: Pos },
    #[error("substitution maps `{var}` of type {expected} to `{term}` of type {found}")]
    TypeMismatch { var: String, expected: Type, found: Type, term: String },
    #[error("`{name}` cannot have type {ty}")]
    InvalidSymbolType { name: String, ty: Type },
}

/***** Signatures *****/

/// What a signature entry denotes, derived from its type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Individual,
    Function { arity: usize },
    Predicate,
}

/// Symbol table for constants and function symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Name, Type>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds (or overwrites) a symbol. The type must be an individual, function
    /// or predicate type.
    pub fn declare(&mut self, name: impl Into<Name>, ty: Type) -> Result<(), AstError> {
        let name = name.into();
        if ty.class().is_none() {
            return Err(AstError::InvalidSymbolType { name: name.to_string(), ty });
        }
        self.symbols.insert(name, ty);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Type> {
        self.symbols.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn kind(&self, name: &str) -> Option<SymbolKind> {
        let ty = self.symbols.get(name)?;
        Some(match ty.class()? {
            TypeClass::Individual => SymbolKind::Individual,
            TypeClass::Function => SymbolKind::Function { arity: ty.arity() },
            TypeClass::Predicate => SymbolKind::Predicate,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.symbols.iter()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.symbols.iter().filter(|(_, t)| t.is_predicate())
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Name> {
        self.symbols.iter().filter(|(_, t)| **t == Type::Iota).map(|(n, _)| n)
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.symbols
            .iter()
            .filter(|(_, t)| **t != Type::Iota && t.is_functional())
            .map(|(n, t)| (n, t.arity()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/***** Expressions *****/

/// A typed variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Name,
    pub ty: Type,
}

impl Var {
    pub fn new(name: impl Into<Name>, ty: Type) -> Self {
        Var { name: name.into(), ty }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExprKind {
    IndConst(Name),
    PredConst(Name),
    IndVar(Name),
    PredVar(Name),
    /// Saturated application of a function symbol.
    FunApp(Name, Vec<Expr>),
    App(Expr, Expr),
    Neg(Expr),
    Eq(Expr, Expr),
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Node {
    kind: ExprKind,
    ty: Type,
}

/// A typed expression. Cloning is cheap.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn make(kind: ExprKind, ty: Type) -> Expr {
        Expr(Arc::new(Node { kind, ty }))
    }

    pub fn ind_const(name: impl Into<Name>) -> Expr {
        Expr::make(ExprKind::IndConst(name.into()), Type::Iota)
    }

    pub fn pred_const(name: impl Into<Name>, ty: Type) -> Result<Expr, AstError> {
        let name = name.into();
        if !ty.is_predicate() {
            return Err(AstError::InvalidSymbolType { name: name.to_string(), ty });
        }
        Ok(Expr::make(ExprKind::PredConst(name), ty))
    }

    pub fn var(v: &Var) -> Result<Expr, AstError> {
        let kind = if v.ty == Type::Iota {
            ExprKind::IndVar(v.name.clone())
        } else if v.ty.is_predicate() {
            ExprKind::PredVar(v.name.clone())
        } else {
            return Err(AstError::InvalidSymbolType { name: v.name.to_string(), ty: v.ty.clone() });
        };
        Ok(Expr::make(kind, v.ty.clone()))
    }

    /// Builds a constant or function-free reference for a signature symbol.
    pub fn constant(sig: &Signature, name: &str) -> Result<Expr, AstError> {
        let ty = sig
            .get(name)
            .ok_or_else(|| AstError::UnboundSymbol { name: name.to_string(), pos: Pos::default() })?;
        match sig.kind(name) {
            Some(SymbolKind::Individual) => Ok(Expr::ind_const(name)),
            Some(SymbolKind::Predicate) => Expr::pred_const(name, ty.clone()),
            _ => Err(AstError::InvalidSymbolType { name: name.to_string(), ty: ty.clone() }),
        }
    }

    pub fn fun_app(name: impl Into<Name>, args: Vec<Expr>) -> Result<Expr, AstError> {
        let name = name.into();
        if args.is_empty() {
            return Err(AstError::FunctionArity { name: name.to_string(), expected: 1, found: 0, pos: Pos::default() });
        }
        for a in &args {
            if a.ty() != &Type::Iota || !a.is_term() {
                return Err(AstError::IllTypedApplication {
                    operator: name.to_string(),
                    operator_ty: Type::function(args.len()),
                    operand_ty: a.ty().clone(),
                    pos: Pos::default(),
                });
            }
        }
        Ok(Expr::make(ExprKind::FunApp(name, args), Type::Iota))
    }

    pub fn app(op: Expr, arg: Expr) -> Result<Expr, AstError> {
        if !op.is_term() || !arg.is_term() {
            return Err(AstError::MisplacedLiteral { pos: Pos::default() });
        }
        match op.ty() {
            Type::Arrow(a, r) if **a == *arg.ty() && op.ty().is_predicate() => {
                let ty = (**r).clone();
                Ok(Expr::make(ExprKind::App(op, arg), ty))
            }
            _ => Err(AstError::IllTypedApplication {
                operator: op.to_string(),
                operator_ty: op.ty().clone(),
                operand_ty: arg.ty().clone(),
                pos: Pos::default(),
            }),
        }
    }

    /// Applies `head` to each argument in turn.
    pub fn apply_all(head: Expr, args: impl IntoIterator<Item = Expr>) -> Result<Expr, AstError> {
        args.into_iter().try_fold(head, Expr::app)
    }

    pub fn neg(atom: Expr) -> Result<Expr, AstError> {
        if !atom.is_term() || atom.ty() != &Type::Omicron {
            return Err(AstError::NegOfNonBoolean { found: atom.ty().clone(), pos: Pos::default() });
        }
        Ok(Expr::make(ExprKind::Neg(atom), Type::Omicron))
    }

    pub fn eq(left: Expr, right: Expr) -> Result<Expr, AstError> {
        if left.ty() != &Type::Iota || right.ty() != &Type::Iota || !left.is_term() || !right.is_term() {
            return Err(AstError::EqOfNonIndividual {
                left: left.ty().clone(),
                right: right.ty().clone(),
                pos: Pos::default(),
            });
        }
        Ok(Expr::make(ExprKind::Eq(left, right), Type::Omicron))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    /// Terms exclude negative and equality literals.
    pub fn is_term(&self) -> bool {
        !matches!(self.kind(), ExprKind::Neg(_) | ExprKind::Eq(..))
    }

    /// A term of type `o`.
    pub fn is_atom(&self) -> bool {
        self.is_term() && *self.ty() == Type::Omicron
    }

    pub fn is_ground(&self) -> bool {
        match self.kind() {
            ExprKind::IndConst(_) | ExprKind::PredConst(_) => true,
            ExprKind::IndVar(_) | ExprKind::PredVar(_) => false,
            ExprKind::FunApp(_, args) => args.iter().all(Expr::is_ground),
            ExprKind::App(a, b) | ExprKind::Eq(a, b) => a.is_ground() && b.is_ground(),
            ExprKind::Neg(a) => a.is_ground(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self.kind() {
            ExprKind::IndConst(_) | ExprKind::PredConst(_) => {}
            ExprKind::IndVar(n) | ExprKind::PredVar(n) => {
                out.insert(Var::new(n.clone(), self.ty().clone()));
            }
            ExprKind::FunApp(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            ExprKind::App(a, b) | ExprKind::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ExprKind::Neg(a) => a.collect_vars(out),
        }
    }

    /// Number of constant, function-symbol and variable occurrences.
    pub fn size(&self) -> usize {
        match self.kind() {
            ExprKind::IndConst(_) | ExprKind::PredConst(_) | ExprKind::IndVar(_) | ExprKind::PredVar(_) => 1,
            ExprKind::FunApp(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
            ExprKind::App(a, b) | ExprKind::Eq(a, b) => a.size() + b.size(),
            ExprKind::Neg(a) => a.size(),
        }
    }

    /// Splits an application chain `h a1 ... an` into `h` and its arguments.
    pub fn spine(&self) -> (&Expr, Vec<&Expr>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let ExprKind::App(op, arg) = cur.kind() {
            args.push(arg);
            cur = op;
        }
        args.reverse();
        (cur, args)
    }

    /// The leftmost symbol of an application chain when it is a predicate
    /// constant.
    pub fn head_predicate(&self) -> Option<&Name> {
        match self.spine().0.kind() {
            ExprKind::PredConst(n) => Some(n),
            _ => None,
        }
    }

    /// The leftmost variable of an application chain, if any.
    pub fn head_variable(&self) -> Option<Var> {
        let head = self.spine().0;
        match head.kind() {
            ExprKind::PredVar(n) | ExprKind::IndVar(n) => Some(Var::new(n.clone(), head.ty().clone())),
            _ => None,
        }
    }

    /// Canonical concrete syntax, identical to `Display`.
    pub fn canonical(&self) -> String {
        self.to_string()
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, operand: bool) -> fmt::Result {
        match self.kind() {
            ExprKind::IndConst(n) | ExprKind::PredConst(n) | ExprKind::IndVar(n) | ExprKind::PredVar(n) => {
                f.write_str(n)
            }
            ExprKind::FunApp(name, args) => {
                if operand {
                    f.write_str("(")?;
                }
                f.write_str(name)?;
                for a in args {
                    f.write_str(" ")?;
                    a.fmt_prec(f, true)?;
                }
                if operand {
                    f.write_str(")")?;
                }
                Ok(())
            }
            ExprKind::App(op, arg) => {
                if operand {
                    f.write_str("(")?;
                }
                op.fmt_prec(f, false)?;
                f.write_str(" ")?;
                arg.fmt_prec(f, true)?;
                if operand {
                    f.write_str(")")?;
                }
                Ok(())
            }
            ExprKind::Neg(a) => {
                f.write_str("~")?;
                a.fmt_prec(f, true)
            }
            ExprKind::Eq(l, r) => {
                l.fmt_prec(f, false)?;
                f.write_str(" = ")?;
                r.fmt_prec(f, false)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

/// Canonical, re-parseable rendering of an expression.
pub fn canonical_print(e: &Expr) -> String {
    e.to_string()
}

pub fn free_vars(e: &Expr) -> BTreeSet<Var> {
    e.free_vars()
}

/***** Substitutions *****/

/// A finite, type-respecting map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    map: BTreeMap<Name, (Var, Expr)>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `var` to `term`. Rebinding a variable replaces the old binding.
    pub fn bind(&mut self, var: Var, term: Expr) -> Result<(), AstError> {
        if var.ty != *term.ty() || !term.is_term() {
            return Err(AstError::TypeMismatch {
                var: var.name.to_string(),
                expected: var.ty.clone(),
                found: term.ty().clone(),
                term: term.to_string(),
            });
        }
        self.map.insert(var.name.clone(), (var, term));
        Ok(())
    }

    pub fn with(mut self, var: Var, term: Expr) -> Result<Self, AstError> {
        self.bind(var, term)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&Expr> {
        self.map.get(name).map(|(_, e)| e)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.values().map(|(v, _)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Expr)> {
        self.map.values().map(|(v, e)| (v, e))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.map.values().all(|(_, e)| e.is_ground())
    }

    /// `self` followed by `then`: applying the result equals applying `self`
    /// and then `then`.
    pub fn compose(&self, then: &Substitution) -> Result<Substitution, AstError> {
        let mut out = Substitution::new();
        for (v, e) in self.map.values() {
            out.bind(v.clone(), apply_substitution(e, then)?)?;
        }
        for (name, (v, e)) in &then.map {
            if !self.map.contains_key(name) {
                out.bind(v.clone(), e.clone())?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, e)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}/{e}")?;
        }
        f.write_str("}")
    }
}

/// Structural replacement of variables by their bound terms.
pub fn apply_substitution(e: &Expr, theta: &Substitution) -> Result<Expr, AstError> {
    if theta.is_empty() {
        return Ok(e.clone());
    }
    Ok(match e.kind() {
        ExprKind::IndConst(_) | ExprKind::PredConst(_) => e.clone(),
        ExprKind::IndVar(n) | ExprKind::PredVar(n) => match theta.map.get(n) {
            Some((_, t)) if t.ty() == e.ty() => t.clone(),
            Some((_, t)) => {
                return Err(AstError::TypeMismatch {
                    var: n.to_string(),
                    expected: e.ty().clone(),
                    found: t.ty().clone(),
                    term: t.to_string(),
                })
            }
            None => e.clone(),
        },
        ExprKind::FunApp(f, args) => {
            let args = args.iter().map(|a| apply_substitution(a, theta)).collect::<Result<Vec<_>, _>>()?;
            Expr::make(ExprKind::FunApp(f.clone(), args), Type::Iota)
        }
        ExprKind::App(a, b) => Expr::make(
            ExprKind::App(apply_substitution(a, theta)?, apply_substitution(b, theta)?),
            e.ty().clone(),
        ),
        ExprKind::Neg(a) => Expr::make(ExprKind::Neg(apply_substitution(a, theta)?), Type::Omicron),
        ExprKind::Eq(a, b) => Expr::make(
            ExprKind::Eq(apply_substitution(a, theta)?, apply_substitution(b, theta)?),
            Type::Omicron,
        ),
    })
}

/***** Clauses *****/

/// `p V1 ... Vn <- L1, ..., Lm.`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Name,
    pub head_ty: Type,
    pub formals: Vec<Var>,
    pub body: Vec<Expr>,
}

impl Clause {
    /// The head atom `p V1 ... Vn`.
    pub fn head_atom(&self) -> Expr {
        let head = Expr::pred_const(self.head.clone(), self.head_ty.clone()).expect("checked clause head");
        let args = self.formals.iter().map(|v| Expr::var(v).expect("checked formal"));
        Expr::apply_all(head, args).expect("checked clause head")
    }

    /// Every variable of the clause, formals included.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = self.formals.iter().cloned().collect();
        for l in &self.body {
            l.collect_vars(&mut out);
        }
        out
    }

    /// Variables occurring in the body but not among the formals.
    pub fn local_vars(&self) -> BTreeSet<Var> {
        let formals: BTreeSet<&Name> = self.formals.iter().map(|v| &v.name).collect();
        let mut out = BTreeSet::new();
        for l in &self.body {
            l.collect_vars(&mut out);
        }
        out.retain(|v| !formals.contains(&v.name));
        out
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.head)?;
        for v in &self.formals {
            write!(f, " {v}")?;
        }
        if !self.body.is_empty() {
            f.write_str(" <- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

/***** Untyped surface trees *****/

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawKind {
    Name(String),
    App(Box<RawExpr>, Box<RawExpr>),
    Neg(Box<RawExpr>),
    Eq(Box<RawExpr>, Box<RawExpr>),
}

/// Untyped expression as produced by the parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawExpr {
    pub kind: RawKind,
    pub pos: Pos,
}

impl RawExpr {
    pub fn name(name: impl Into<String>, pos: Pos) -> Self {
        RawExpr { kind: RawKind::Name(name.into()), pos }
    }

    pub fn app(op: RawExpr, arg: RawExpr) -> Self {
        let pos = op.pos;
        RawExpr { kind: RawKind::App(Box::new(op), Box::new(arg)), pos }
    }

    /// Flattens an application chain into its head and arguments.
    pub fn spine(&self) -> (&RawExpr, Vec<&RawExpr>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let RawKind::App(op, arg) = &cur.kind {
            args.push(&**arg);
            cur = op;
        }
        args.reverse();
        (cur, args)
    }

    /// Visits every name occurrence with its position.
    pub fn for_each_name<'a>(&'a self, f: &mut impl FnMut(&'a str, Pos)) {
        match &self.kind {
            RawKind::Name(n) => f(n, self.pos),
            RawKind::App(a, b) | RawKind::Eq(a, b) => {
                a.for_each_name(f);
                b.for_each_name(f);
            }
            RawKind::Neg(a) => a.for_each_name(f),
        }
    }
}

/// Names starting with an uppercase letter or `_` are variables.
pub fn is_variable_name(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_uppercase() || c == '_')
}

/// Elaborates an untyped tree into a typed expression.
///
/// Lowercase names are looked up in `sig`, variables in `env`.
pub fn elaborate(raw: &RawExpr, sig: &Signature, env: &BTreeMap<Name, Type>) -> Result<Expr, AstError> {
    match &raw.kind {
        RawKind::Neg(inner) => {
            let atom = elaborate_term(inner, sig, env)?;
            if *atom.ty() != Type::Omicron {
                return Err(AstError::NegOfNonBoolean { found: atom.ty().clone(), pos: raw.pos });
            }
            Expr::neg(atom).map_err(|e| with_pos(e, raw.pos))
        }
        RawKind::Eq(l, r) => {
            let left = elaborate_term(l, sig, env)?;
            let right = elaborate_term(r, sig, env)?;
            Expr::eq(left, right).map_err(|e| with_pos(e, raw.pos))
        }
        _ => elaborate_term(raw, sig, env),
    }
}

/// Infers the type of an untyped expression; see [`elaborate`].
pub fn type_of(raw: &RawExpr, sig: &Signature, env: &BTreeMap<Name, Type>) -> Result<Type, AstError> {
    elaborate(raw, sig, env).map(|e| e.ty().clone())
}

fn elaborate_term(raw: &RawExpr, sig: &Signature, env: &BTreeMap<Name, Type>) -> Result<Expr, AstError> {
    let (head, args) = raw.spine();
    let name = match &head.kind {
        RawKind::Name(n) => n,
        _ => return Err(AstError::MisplacedLiteral { pos: head.pos }),
    };
    let unbound = || AstError::UnboundSymbol { name: name.clone(), pos: head.pos };
    let head_expr = if is_variable_name(name) {
        let ty = env.get(name.as_str()).ok_or_else(unbound)?;
        Expr::var(&Var::new(name.as_str(), ty.clone())).map_err(|e| with_pos(e, head.pos))?
    } else {
        match sig.kind(name).ok_or_else(unbound)? {
            SymbolKind::Function { arity } => {
                if args.len() != arity {
                    return Err(AstError::FunctionArity {
                        name: name.clone(),
                        expected: arity,
                        found: args.len(),
                        pos: head.pos,
                    });
                }
                let mut elaborated = Vec::with_capacity(arity);
                for a in &args {
                    let e = elaborate_term(a, sig, env)?;
                    if *e.ty() != Type::Iota {
                        return Err(AstError::IllTypedApplication {
                            operator: name.clone(),
                            operator_ty: Type::function(arity),
                            operand_ty: e.ty().clone(),
                            pos: a.pos,
                        });
                    }
                    elaborated.push(e);
                }
                return Expr::fun_app(name.as_str(), elaborated).map_err(|e| with_pos(e, raw.pos));
            }
            _ => Expr::constant(sig, name).map_err(|e| with_pos(e, head.pos))?,
        }
    };
    let mut acc = head_expr;
    for a in args {
        let arg = elaborate_term(a, sig, env)?;
        acc = Expr::app(acc, arg).map_err(|e| with_pos(e, a.pos))?;
    }
    Ok(acc)
}

fn with_pos(err: AstError, at: Pos) -> AstError {
    match err {
        AstError::UnboundSymbol { name, .. } => AstError::UnboundSymbol { name, pos: at },
        AstError::IllTypedApplication { operator, operator_ty, operand_ty, .. } => {
            AstError::IllTypedApplication { operator, operator_ty, operand_ty, pos: at }
        }
        AstError::FunctionArity { name, expected, found, .. } => AstError::FunctionArity { name, expected, found, pos: at },
        AstError::NegOfNonBoolean { found, .. } => AstError::NegOfNonBoolean { found, pos: at },
        AstError::EqOfNonIndividual { left, right, .. } => AstError::EqOfNonIndividual { left, right, pos: at },
        AstError::MisplacedLiteral { .. } => AstError::MisplacedLiteral { pos: at },
        other => other,
    }
}
