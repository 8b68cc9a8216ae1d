//! Three-valued interpretations of ground programs.

use std::cmp::Ordering as CmpOrdering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::grounder::{AtomId, GroundClause, GroundLiteral, GroundProgram};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InterpError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("brute-force search over {atoms} atoms exceeds the limit of {limit}")]
    TooLarge { atoms: usize, limit: usize },
}

/// `false`, `0` (undefined) or `true`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthValue {
    False,
    Undefined,
    True,
}

impl TruthValue {
    pub const ALL: [TruthValue; 3] = [TruthValue::False, TruthValue::Undefined, TruthValue::True];

    pub fn negate(self) -> Self {
        match self {
            TruthValue::False => TruthValue::True,
            TruthValue::Undefined => TruthValue::Undefined,
            TruthValue::True => TruthValue::False,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    /// Truth order `false <= 0 <= true`.
    pub fn leq_truth(self, other: Self) -> bool {
        self <= other
    }

    /// Information order: `0` below both `false` and `true`.
    pub fn leq_fitting(self, other: Self) -> bool {
        self == other || self == TruthValue::Undefined
    }

    pub fn name(self) -> &'static str {
        match self {
            TruthValue::False => "false",
            TruthValue::Undefined => "undefined",
            TruthValue::True => "true",
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue::False => "false",
            TruthValue::Undefined => "0",
            TruthValue::True => "true",
        })
    }
}

/// Which partial order to compare interpretations by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    Truth,
    Fitting,
}

/// `⟨T, F⟩` over the atom table of a ground program, stored as one value per atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialInterpretation {
    values: Vec<TruthValue>,
}

impl PartialInterpretation {
    /// Everything undefined.
    pub fn undefined(atoms: usize) -> Self {
        PartialInterpretation { values: vec![TruthValue::Undefined; atoms] }
    }

    /// Everything false.
    pub fn all_false(atoms: usize) -> Self {
        PartialInterpretation { values: vec![TruthValue::False; atoms] }
    }

    pub fn from_values(values: Vec<TruthValue>) -> Self {
        PartialInterpretation { values }
    }

    /// `⟨T, F⟩`; atoms in both sets are rejected.
    pub fn from_sets(atoms: usize, t: &[AtomId], f: &[AtomId]) -> Option<Self> {
        let mut i = Self::undefined(atoms);
        for &a in t {
            *i.values.get_mut(a)? = TruthValue::True;
        }
        for &a in f {
            let slot = i.values.get_mut(a)?;
            if *slot == TruthValue::True {
                return None;
            }
            *slot = TruthValue::False;
        }
        Some(i)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[TruthValue] {
        &self.values
    }

    pub fn get(&self, a: AtomId) -> TruthValue {
        self.values[a]
    }

    pub fn set(&mut self, a: AtomId, v: TruthValue) {
        self.values[a] = v;
    }

    pub fn true_set(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.ids_with(TruthValue::True)
    }

    pub fn false_set(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.ids_with(TruthValue::False)
    }

    pub fn undefined_set(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.ids_with(TruthValue::Undefined)
    }

    fn ids_with(&self, v: TruthValue) -> impl Iterator<Item = AtomId> + '_ {
        self.values.iter().enumerate().filter(move |(_, &x)| x == v).map(|(i, _)| i)
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|&v| v != TruthValue::Undefined)
    }

    pub fn value_of_literal(&self, lit: &GroundLiteral) -> TruthValue {
        match *lit {
            GroundLiteral::Pos(a) => self.values[a],
            GroundLiteral::Neg(a) => self.values[a].negate(),
            GroundLiteral::Const(b) => TruthValue::from_bool(b),
        }
    }

    /// Minimum in the truth order; `true` for the empty conjunction.
    pub fn value_of_conj(&self, lits: &[GroundLiteral]) -> TruthValue {
        lits.iter().map(|l| self.value_of_literal(l)).min().unwrap_or(TruthValue::True)
    }

    /// Looks an atom up by its canonical key.
    pub fn value_of_key(&self, gp: &GroundProgram, key: &str) -> Result<TruthValue, InterpError> {
        gp.lookup(key).map(|a| self.values[a]).ok_or_else(|| InterpError::UnknownAtom(key.to_string()))
    }

    pub fn dump(&self, gp: &GroundProgram) -> ModelDump {
        let mut d = ModelDump::default();
        for (a, v) in self.values.iter().enumerate() {
            let key = gp.atom(a).key().to_string();
            match v {
                TruthValue::True => d.r#true.push(key),
                TruthValue::False => d.r#false.push(key),
                TruthValue::Undefined => d.undefined.push(key),
            }
        }
        d.r#true.sort();
        d.r#false.sort();
        d.undefined.sort();
        d
    }
}

/// Value of a literal under `i`.
pub fn value_of(i: &PartialInterpretation, lit: &GroundLiteral) -> Result<TruthValue, InterpError> {
    match *lit {
        GroundLiteral::Pos(a) | GroundLiteral::Neg(a) if a >= i.len() => Err(InterpError::UnknownAtom(format!("#{a}"))),
        _ => Ok(i.value_of_literal(lit)),
    }
}

pub fn value_of_conj(i: &PartialInterpretation, lits: &[GroundLiteral]) -> Result<TruthValue, InterpError> {
    for l in lits {
        value_of(i, l)?;
    }
    Ok(i.value_of_conj(lits))
}

/// Sorted atom keys by value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ModelDump {
    #[serde(rename = "true")]
    pub r#true: Vec<String>,
    #[serde(rename = "false")]
    pub r#false: Vec<String>,
    pub undefined: Vec<String>,
}

fn satisfies(i: &PartialInterpretation, c: &GroundClause) -> bool {
    i.value_of_conj(&c.body) <= i.get(c.head)
}

/// Whether every clause's head is at least as true as its body; otherwise the
/// index of the first violated clause.
pub fn is_model(i: &PartialInterpretation, gp: &GroundProgram) -> Result<(), usize> {
    match gp.clauses().iter().position(|c| !satisfies(i, c)) {
        None => Ok(()),
        Some(ci) => Err(ci),
    }
}

pub fn leq(a: &PartialInterpretation, b: &PartialInterpretation, ord: Ordering) -> bool {
    a.len() == b.len()
        && a.values.iter().zip(&b.values).all(|(&x, &y)| match ord {
            Ordering::Truth => x.leq_truth(y),
            Ordering::Fitting => x.leq_fitting(y),
        })
}

/// `Some(Less)` etc. when comparable.
pub fn compare(a: &PartialInterpretation, b: &PartialInterpretation, ord: Ordering) -> Option<CmpOrdering> {
    match (leq(a, b, ord), leq(b, a, ord)) {
        (true, true) => Some(CmpOrdering::Equal),
        (true, false) => Some(CmpOrdering::Less),
        (false, true) => Some(CmpOrdering::Greater),
        (false, false) => None,
    }
}

pub const DEFAULT_ORACLE_LIMIT: usize = 12;

/// Every model with no strictly smaller model under `ord`, by exhaustive
/// enumeration of all `3^n` interpretations.
pub fn minimal_models_bruteforce(
    gp: &GroundProgram,
    ord: Ordering,
    limit: usize,
) -> Result<Vec<PartialInterpretation>, InterpError> {
    let n = gp.atom_count();
    if n > limit || n > 20 {
        return Err(InterpError::TooLarge { atoms: n, limit: limit.min(20) });
    }
    // Each interpretation is a base-3 number whose digits are chosen so that
    // every covering predecessor has a smaller code. A single ascending pass
    // then decides "some model lies strictly below" from the covers alone.
    let digits: [TruthValue; 3] = match ord {
        Ordering::Truth => [TruthValue::False, TruthValue::Undefined, TruthValue::True],
        Ordering::Fitting => [TruthValue::Undefined, TruthValue::False, TruthValue::True],
    };
    let total = 3usize.pow(n as u32);
    let mut pow = vec![1usize; n];
    for i in 1..n {
        pow[i] = pow[i - 1] * 3;
    }
    let mut below = vec![false; total];
    let mut model = vec![false; total];
    let mut out = Vec::new();
    let mut values = vec![digits[0]; n];
    for code in 0..total {
        let mut rest = code;
        for v in values.iter_mut() {
            *v = digits[rest % 3];
            rest /= 3;
        }
        let interp = PartialInterpretation { values: values.clone() };
        model[code] = is_model(&interp, gp).is_ok();
        let mut dominated = false;
        let mut rest = code;
        for p in pow.iter().take(n) {
            let d = rest % 3;
            rest /= 3;
            let covers: &[usize] = match (ord, d) {
                (_, 0) => &[],
                (Ordering::Truth, 1) => &[0],
                (Ordering::Truth, _) => &[1],
                (Ordering::Fitting, _) => &[0],
            };
            for &lower in covers {
                let pred = code - (d - lower) * p;
                if model[pred] || below[pred] {
                    dominated = true;
                }
            }
        }
        below[code] = dominated;
        if model[code] && !dominated {
            out.push(interp);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::{ground_instantiation, Window};
    use crate::typecheck::load_program;
    use TruthValue::*;

    fn ground(text: &str) -> GroundProgram {
        ground_instantiation(&load_program(text).unwrap(), Window::new(1)).unwrap()
    }

    #[test]
    fn negation_table() {
        assert_eq!(False.negate(), True);
        assert_eq!(Undefined.negate(), Undefined);
        assert_eq!(True.negate(), False);
        let i = PartialInterpretation::from_values(vec![True]);
        assert_eq!(value_of(&i, &GroundLiteral::Neg(0)), Ok(False));
        assert_eq!(value_of(&i, &GroundLiteral::Const(true)), Ok(True));
        assert!(value_of(&i, &GroundLiteral::Pos(3)).is_err());
        assert_eq!(PartialInterpretation::undefined(1).get(0), Undefined);
    }

    #[test]
    fn conjunction_is_a_minimum() {
        let i = PartialInterpretation::from_values(vec![True, Undefined]);
        assert_eq!(i.value_of_conj(&[GroundLiteral::Pos(0), GroundLiteral::Pos(1)]), Undefined);
        assert_eq!(i.value_of_conj(&[]), True);
    }

    #[test]
    fn fact_forces_head() {
        let gp = ground("type p : o. p.");
        assert_eq!(is_model(&PartialInterpretation::all_false(1), &gp), Err(0));
        assert_eq!(is_model(&PartialInterpretation::from_values(vec![True]), &gp), Ok(()));
    }

    #[test]
    fn orderings() {
        let pf = PartialInterpretation::from_values(vec![False]);
        let pt = PartialInterpretation::from_values(vec![True]);
        let pu = PartialInterpretation::undefined(1);
        assert!(leq(&pf, &pt, Ordering::Truth));
        assert!(!leq(&pf, &pt, Ordering::Fitting));
        assert!(leq(&pu, &pf, Ordering::Fitting) && leq(&pu, &pt, Ordering::Fitting));
        assert_eq!(compare(&pf, &pt, Ordering::Fitting), None);
    }

    #[test]
    fn minimal_models_of_tiny_programs() {
        // p <- ~q over {p, q}
        let gp = ground("type p : o. type q : o. p <- ~q.");
        let p = gp.lookup("p").unwrap();
        let q = gp.lookup("q").unwrap();
        let wfs = PartialInterpretation::from_sets(2, &[p], &[q]).unwrap();
        assert!(minimal_models_bruteforce(&gp, Ordering::Truth, 12).unwrap().contains(&wfs));
        // nothing forces a value here, so the least informative interpretation
        // is a model and the only information-minimal one
        assert_eq!(
            minimal_models_bruteforce(&gp, Ordering::Fitting, 12).unwrap(),
            vec![PartialInterpretation::undefined(2)]
        );

        // no clauses, one atom
        let mut gp = GroundProgram::new();
        let atom = crate::grounder::GroundAtom::new(
            crate::ast::Expr::pred_const("p", crate::ast::Type::Omicron).unwrap(),
        )
        .unwrap();
        gp.intern(atom);
        assert_eq!(
            minimal_models_bruteforce(&gp, Ordering::Truth, 12).unwrap(),
            vec![PartialInterpretation::all_false(1)]
        );
        assert_eq!(
            minimal_models_bruteforce(&gp, Ordering::Fitting, 12).unwrap(),
            vec![PartialInterpretation::undefined(1)]
        );
    }

    #[test]
    fn oracle_refuses_large_inputs() {
        let consts: String = (0..13).map(|i| format!("p c{i}. ")).collect();
        let gp = ground(&format!("type p : i -> o. {consts}"));
        assert_eq!(gp.atom_count(), 13);
        assert_eq!(
            minimal_models_bruteforce(&gp, Ordering::Fitting, 12),
            Err(InterpError::TooLarge { atoms: 13, limit: 12 })
        );
    }

    #[test]
    fn dump_is_sorted() {
        let gp = ground("type q : i -> o. type z : i -> o. q X <- X = a. z c. z b.");
        let i = PartialInterpretation::all_false(gp.atom_count());
        let d = i.dump(&gp);
        let mut sorted = d.r#false.clone();
        sorted.sort();
        assert_eq!(d.r#false, sorted);
        assert!(d.r#true.is_empty());
    }
}
