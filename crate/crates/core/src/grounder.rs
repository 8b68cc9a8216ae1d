//! Bounded Herbrand universes and ground instantiation.
//!
//! `U^k_ρ` is the set of ground terms of type `ρ` with at most `k` symbol
//! occurrences. Two groundings are offered: the exhaustive one, where every
//! clause variable ranges over `U^k`, and a demand-driven one that starts from
//! a set of root atoms, matches clause heads against reachable atoms and lets
//! only body-local variables range over `U^k`.
//!
//! Demand grounding need not terminate (`r X <- r (f X)`), so reachable atoms
//! larger than the window's atom budget are kept in the atom table but never
//! expanded. Such atoms are *truncated*; any atom depending on one is
//! *tainted* and its computed value is not to be trusted.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ast::{apply_substitution, Clause, Expr, ExprKind, Substitution, Type, Var};
use crate::typecheck::Program;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GroundError {
    #[error("{ty} is not an argument type")]
    NotAnArgumentType { ty: Type },
    #[error("`{atom}` is not a ground atom headed by a predicate constant")]
    NotGroundAtom { atom: String },
    #[error("grounding exceeds {limit} clauses")]
    TooLarge { limit: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
}

/// Bounds for a grounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    /// Symbol budget `k` for substituted terms.
    pub depth: usize,
    /// Demand grounding never expands atoms larger than this.
    pub max_atom_size: usize,
    /// Hard cap on the number of ground clauses.
    pub max_clauses: usize,
}

impl Window {
    pub const DEFAULT_MAX_CLAUSES: usize = 1_000_000;

    pub fn new(depth: usize) -> Self {
        Window { depth, max_atom_size: 8 * depth.max(1), max_clauses: Self::DEFAULT_MAX_CLAUSES }
    }

    pub fn with_atom_budget(mut self, max_atom_size: usize) -> Self {
        self.max_atom_size = max_atom_size;
        self
    }
}

/***** Universes *****/

/// Memoized enumeration of `U^k_ρ` over a program's symbols.
#[derive(Clone, Debug)]
pub struct UniverseIndex {
    depth: usize,
    individuals: Vec<Expr>,
    functions: Vec<(Arc<str>, usize)>,
    predicates: Vec<Expr>,
    /// Every arrow type on the result chain of some predicate constant.
    operator_types: Vec<Type>,
    exact: HashMap<(Type, usize), Arc<[Expr]>>,
}

impl UniverseIndex {
    pub fn new(program: &Program, depth: usize) -> Result<Self, GroundError> {
        if depth == 0 {
            return Err(GroundError::ZeroDepth);
        }
        let sig = program.signature();
        let individuals = sig.individuals().map(|n| Expr::ind_const(n.clone())).collect();
        let functions = sig.functions().map(|(n, a)| (n.clone(), a)).collect();
        let mut predicates = Vec::new();
        let mut operator_types = BTreeSet::new();
        for (name, ty) in sig.predicates() {
            predicates.push(Expr::pred_const(name.clone(), ty.clone()).expect("declared predicate"));
            for t in ty.result_chain() {
                if matches!(t, Type::Arrow(..)) {
                    operator_types.insert(t.clone());
                }
            }
        }
        Ok(UniverseIndex {
            depth,
            individuals,
            functions,
            predicates,
            operator_types: operator_types.into_iter().collect(),
            exact: HashMap::new(),
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn has_individuals(&self) -> bool {
        !self.individuals.is_empty()
    }

    /// `U^k_ρ` in canonical order: by size, then by printed form.
    pub fn universe(&mut self, ty: &Type) -> Result<Vec<Expr>, GroundError> {
        if !ty.is_argument() {
            return Err(GroundError::NotAnArgumentType { ty: ty.clone() });
        }
        let mut out = Vec::new();
        for n in 1..=self.depth {
            out.extend(self.exact(ty, n).iter().cloned());
        }
        Ok(out)
    }

    /// Ground terms of type `ty` with exactly `n` symbols.
    fn exact(&mut self, ty: &Type, n: usize) -> Arc<[Expr]> {
        if let Some(v) = self.exact.get(&(ty.clone(), n)) {
            return v.clone();
        }
        let mut out: Vec<Expr> = Vec::new();
        if n == 1 {
            if *ty == Type::Iota {
                out.extend(self.individuals.iter().cloned());
            } else {
                out.extend(self.predicates.iter().filter(|p| p.ty() == ty).cloned());
            }
        } else if *ty == Type::Iota {
            for (f, arity) in self.functions.clone() {
                for parts in compositions(n - 1, arity) {
                    let pools: Vec<Arc<[Expr]>> = parts.iter().map(|&m| self.exact(&Type::Iota, m)).collect();
                    for_each_product(&pools, &mut |args| {
                        out.push(Expr::fun_app(f.clone(), args.to_vec()).expect("well-typed function application"));
                    });
                }
            }
        } else {
            let ops: Vec<Type> = self
                .operator_types
                .iter()
                .filter(|t| matches!(t, Type::Arrow(_, r) if **r == *ty))
                .cloned()
                .collect();
            for op_ty in ops {
                let Type::Arrow(arg_ty, _) = &op_ty else { unreachable!() };
                for n1 in 1..n {
                    let heads = self.exact(&op_ty, n1);
                    if heads.is_empty() {
                        continue;
                    }
                    let args = self.exact(arg_ty, n - n1);
                    for h in heads.iter() {
                        for a in args.iter() {
                            out.push(Expr::app(h.clone(), a.clone()).expect("well-typed application"));
                        }
                    }
                }
            }
        }
        let mut keyed: Vec<(String, Expr)> = out.into_iter().map(|e| (e.to_string(), e)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        let v: Arc<[Expr]> = keyed.into_iter().map(|(_, e)| e).collect();
        self.exact.insert((ty.clone(), n), v.clone());
        v
    }
}

/// Ordered splits of `total` into `parts` positive summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Calls `f` on every element of the cartesian product, in lexicographic order.
fn for_each_product<T: Clone>(pools: &[impl AsRef<[T]>], f: &mut impl FnMut(&[T])) {
    fn go<T: Clone>(pools: &[impl AsRef<[T]>], acc: &mut Vec<T>, f: &mut impl FnMut(&[T])) {
        match pools.split_first() {
            None => f(acc),
            Some((first, rest)) => {
                for x in first.as_ref() {
                    acc.push(x.clone());
                    go(rest, acc, f);
                    acc.pop();
                }
            }
        }
    }
    go(pools, &mut Vec::with_capacity(pools.len()), f)
}

/// `U^k_ρ` for a single type.
pub fn herbrand_universe(program: &Program, ty: &Type, depth: usize) -> Result<Vec<Expr>, GroundError> {
    UniverseIndex::new(program, depth)?.universe(ty)
}

/***** Ground programs *****/

pub type AtomId = usize;

/// A ground atom and its canonical key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    key: String,
    expr: Expr,
}

impl GroundAtom {
    pub fn new(expr: Expr) -> Result<Self, GroundError> {
        if !expr.is_atom() || !expr.is_ground() || expr.head_predicate().is_none() {
            return Err(GroundError::NotGroundAtom { atom: expr.to_string() });
        }
        Ok(GroundAtom { key: expr.to_string(), expr })
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Name of the leftmost predicate constant.
    pub fn predicate(&self) -> &str {
        self.expr.head_predicate().expect("checked on construction")
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundLiteral {
    Pos(AtomId),
    Neg(AtomId),
    /// A resolved equality.
    Const(bool),
}

/// Where a ground clause came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub clause: usize,
    pub theta: Substitution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundClause {
    pub head: AtomId,
    pub body: Vec<GroundLiteral>,
    pub provenance: Provenance,
}

/// A finite ground program together with its atom table.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    atoms: Vec<GroundAtom>,
    ids: HashMap<Expr, AtomId>,
    keys: HashMap<String, AtomId>,
    clauses: Vec<GroundClause>,
    by_head: Vec<Vec<usize>>,
    seen: HashSet<(AtomId, Vec<GroundLiteral>)>,
    truncated: BTreeSet<AtomId>,
}

impl GroundProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns an atom, returning its id.
    pub fn intern(&mut self, atom: GroundAtom) -> AtomId {
        if let Some(&id) = self.ids.get(&atom.expr) {
            return id;
        }
        let id = self.atoms.len();
        self.ids.insert(atom.expr.clone(), id);
        self.keys.insert(atom.key.clone(), id);
        self.atoms.push(atom);
        self.by_head.push(Vec::new());
        id
    }

    fn intern_expr(&mut self, e: Expr) -> AtomId {
        if let Some(&id) = self.ids.get(&e) {
            return id;
        }
        self.intern(GroundAtom::new(e).expect("instances of checked clauses are ground atoms"))
    }

    /// Adds a clause unless an identical one is present. Returns whether it was new.
    pub fn add_clause(&mut self, clause: GroundClause) -> bool {
        if !self.seen.insert((clause.head, clause.body.clone())) {
            return false;
        }
        self.by_head[clause.head].push(self.clauses.len());
        self.clauses.push(clause);
        true
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id]
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn id_of(&self, e: &Expr) -> Option<AtomId> {
        self.ids.get(e).copied()
    }

    /// Looks an atom up by its canonical key.
    pub fn lookup(&self, key: &str) -> Option<AtomId> {
        self.keys.get(key).copied()
    }

    pub fn clauses(&self) -> &[GroundClause] {
        &self.clauses
    }

    /// Indices of the clauses whose head is `atom`.
    pub fn clauses_for(&self, atom: AtomId) -> &[usize] {
        &self.by_head[atom]
    }

    /// Atoms that were reached but not expanded.
    pub fn truncated(&self) -> &BTreeSet<AtomId> {
        &self.truncated
    }

    pub fn is_truncated(&self) -> bool {
        !self.truncated.is_empty()
    }

    /// Per atom: whether it depends, through clause bodies, on a truncated atom.
    pub fn tainted(&self) -> Vec<bool> {
        let mut tainted = vec![false; self.atoms.len()];
        let mut users: Vec<Vec<AtomId>> = vec![Vec::new(); self.atoms.len()];
        for c in &self.clauses {
            for l in &c.body {
                if let GroundLiteral::Pos(a) | GroundLiteral::Neg(a) = *l {
                    users[a].push(c.head);
                }
            }
        }
        let mut queue: VecDeque<AtomId> = self.truncated.iter().copied().collect();
        for &a in &self.truncated {
            tainted[a] = true;
        }
        while let Some(a) = queue.pop_front() {
            for &h in &users[a] {
                if !tainted[h] {
                    tainted[h] = true;
                    queue.push_back(h);
                }
            }
        }
        tainted
    }

    pub fn literal_to_string(&self, l: &GroundLiteral) -> String {
        match *l {
            GroundLiteral::Pos(a) => self.atoms[a].key.clone(),
            GroundLiteral::Neg(a) => format!("~{}", Operand(self.atoms[a].expr())),
            GroundLiteral::Const(b) => b.to_string(),
        }
    }

    pub fn clause_to_string(&self, c: &GroundClause) -> String {
        let mut s = self.atoms[c.head].key.clone();
        if !c.body.is_empty() {
            s.push_str(" <- ");
            let lits: Vec<String> = c.body.iter().map(|l| self.literal_to_string(l)).collect();
            s.push_str(&lits.join(", "));
        }
        s.push('.');
        s
    }

    /// One ground clause per line, in clause order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in &self.clauses {
            out.push_str(&self.clause_to_string(c));
            out.push('\n');
        }
        out
    }

    /// The set of printed clauses, for inclusion checks.
    pub fn clause_set(&self) -> BTreeSet<String> {
        self.clauses.iter().map(|c| self.clause_to_string(c)).collect()
    }
}

/// Prints an atom in operand position.
struct Operand<'a>(&'a Expr);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.kind() {
            ExprKind::App(..) | ExprKind::FunApp(..) => write!(f, "({})", self.0),
            _ => write!(f, "{}", self.0),
        }
    }
}

/***** Instantiation *****/

/// Builds ground clauses of a program, exhaustively or on demand.
#[derive(Clone, Debug)]
pub struct Grounder<'p> {
    program: &'p Program,
    window: Window,
    universes: UniverseIndex,
    ground: GroundProgram,
    expanded: HashSet<AtomId>,
}

impl<'p> Grounder<'p> {
    pub fn new(program: &'p Program, window: Window) -> Result<Self, GroundError> {
        Ok(Grounder {
            program,
            window,
            universes: UniverseIndex::new(program, window.depth)?,
            ground: GroundProgram::new(),
            expanded: HashSet::new(),
        })
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    pub fn ground(&self) -> &GroundProgram {
        &self.ground
    }

    pub fn into_ground(self) -> GroundProgram {
        self.ground
    }

    pub fn universes(&mut self) -> &mut UniverseIndex {
        &mut self.universes
    }

    /// Adds every ground instance of every clause over `U^k`.
    pub fn instantiate_all(&mut self) -> Result<(), GroundError> {
        for (ci, clause) in self.program.clauses().iter().enumerate() {
            let vars: Vec<Var> = clause.vars().into_iter().collect();
            self.instantiate(ci, clause, Substitution::new(), &vars, None)?;
        }
        Ok(())
    }

    /// Extends the grounding with the dependency closure of `roots`.
    pub fn extend<I: IntoIterator<Item = Expr>>(&mut self, roots: I) -> Result<Vec<AtomId>, GroundError> {
        let mut ids = Vec::new();
        let mut queue = VecDeque::new();
        for r in roots {
            let id = self.ground.intern(GroundAtom::new(r)?);
            ids.push(id);
            queue.push_back(id);
        }
        while let Some(id) = queue.pop_front() {
            if self.expanded.contains(&id) {
                continue;
            }
            if self.ground.atoms[id].expr.size() > self.window.max_atom_size {
                self.ground.truncated.insert(id);
                continue;
            }
            self.expanded.insert(id);
            let atom = self.ground.atoms[id].expr.clone();
            let (_, args) = atom.spine();
            let pred = atom.head_predicate().expect("ground atom").clone();
            for &ci in self.program.clauses_for(&pred) {
                let clause = &self.program.clauses()[ci];
                let mut theta = Substitution::new();
                for (v, a) in clause.formals.iter().zip(&args) {
                    theta.bind(v.clone(), (*a).clone()).expect("atom is well-typed");
                }
                let locals: Vec<Var> = clause.local_vars().into_iter().collect();
                self.instantiate(ci, clause, theta, &locals, Some(&mut queue))?;
            }
        }
        Ok(ids)
    }

    fn instantiate(
        &mut self,
        ci: usize,
        clause: &Clause,
        theta: Substitution,
        free: &[Var],
        mut queue: Option<&mut VecDeque<AtomId>>,
    ) -> Result<(), GroundError> {
        let mut pools = Vec::with_capacity(free.len());
        for v in free {
            pools.push(self.universes.universe(&v.ty)?);
        }
        let head = clause.head_atom();
        let mut result = Ok(());
        let limit = self.window.max_clauses;
        let ground = &mut self.ground;
        for_each_product(&pools, &mut |terms: &[Expr]| {
            if result.is_err() {
                return;
            }
            let mut theta = theta.clone();
            for (v, t) in free.iter().zip(terms) {
                theta.bind(v.clone(), t.clone()).expect("universe terms are well-typed");
            }
            let h = ground.intern_expr(apply_substitution(&head, &theta).expect("well-typed substitution"));
            let mut body = Vec::with_capacity(clause.body.len());
            for lit in &clause.body {
                let g = apply_substitution(lit, &theta).expect("well-typed substitution");
                body.push(match g.kind() {
                    ExprKind::Eq(l, r) => GroundLiteral::Const(l == r),
                    ExprKind::Neg(a) => GroundLiteral::Neg(ground.intern_expr(a.clone())),
                    _ => GroundLiteral::Pos(ground.intern_expr(g)),
                });
            }
            if let Some(q) = queue.as_deref_mut() {
                for l in &body {
                    if let GroundLiteral::Pos(a) | GroundLiteral::Neg(a) = *l {
                        q.push_back(a);
                    }
                }
            }
            ground.add_clause(GroundClause { head: h, body, provenance: Provenance { clause: ci, theta } });
            if ground.clauses.len() > limit {
                result = Err(GroundError::TooLarge { limit });
            }
        });
        result
    }
}

/// Every ground instance of the program whose substituted terms lie in `U^k`.
pub fn ground_instantiation(program: &Program, window: Window) -> Result<GroundProgram, GroundError> {
    let mut g = Grounder::new(program, window)?;
    g.instantiate_all()?;
    Ok(g.into_ground())
}

/// The dependency closure of `roots`: clauses whose heads are reachable,
/// with head formals bound by matching and body-local variables over `U^k`.
pub fn relevant_grounding(
    program: &Program,
    roots: impl IntoIterator<Item = Expr>,
    window: Window,
) -> Result<GroundProgram, GroundError> {
    let mut g = Grounder::new(program, window)?;
    g.extend(roots)?;
    Ok(g.into_ground())
}

/// Re-derives a ground clause from its provenance.
pub fn replay(program: &Program, c: &GroundClause) -> Option<String> {
    let clause = program.clauses().get(c.provenance.clause)?;
    let head = apply_substitution(&clause.head_atom(), &c.provenance.theta).ok()?;
    let mut s = head.to_string();
    if !clause.body.is_empty() {
        let mut lits = Vec::new();
        for l in &clause.body {
            let g = apply_substitution(l, &c.provenance.theta).ok()?;
            lits.push(match g.kind() {
                ExprKind::Eq(a, b) => (a == b).to_string(),
                _ => g.to_string(),
            });
        }
        s.push_str(" <- ");
        s.push_str(&lits.join(", "));
    }
    s.push('.');
    Some(s)
}
