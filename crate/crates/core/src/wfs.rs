//! Well-founded models by the iterated `Θ_J` fixpoint.
//!
//! `Θ_J(I)` makes an atom true when some clause has every literal true in `J`
//! or positive and true in `I`, and false when every clause has a literal
//! false in `J` or positive and false in `I`. Negative literals are read in
//! `J` only. Starting from `⟨∅, B⟩`, `Θ_J` climbs the truth order to its least
//! fixpoint `Θ_J↑ω`; the outer sequence `M_0 = ⟨∅, ∅⟩`, `M_{α+1} = Θ_{M_α}↑ω`
//! climbs the information order until `M_λ = Θ_{M_λ}↑ω`.

use crate::grounder::{AtomId, GroundLiteral, GroundProgram};
use crate::interp::{leq, InterpError, Ordering, PartialInterpretation, TruthValue};

/// How the inner fixpoint is iterated. Both produce the same sequence of
/// interpretations; semi-naive only re-evaluates atoms whose positive body
/// atoms changed in the previous step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Evaluation {
    Naive,
    #[default]
    SemiNaive,
}

/// Stages of the outer iteration plus bookkeeping about the inner ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTrace {
    /// `M_0, ..., M_λ`.
    pub stages: Vec<PartialInterpretation>,
    /// Number of `Θ` applications to reach each `Θ_{M_α}↑ω`, including the
    /// final one, which confirms the fixpoint.
    pub inner_lengths: Vec<usize>,
    /// Whether every inner sequence was increasing in the truth order.
    pub inner_increasing: bool,
}

impl ThetaTrace {
    /// The index `λ` of the final stage.
    pub fn lambda(&self) -> usize {
        self.stages.len() - 1
    }

    /// Whether the outer stages increase in the information order.
    pub fn outer_increasing(&self) -> bool {
        self.stages.windows(2).all(|w| leq(&w[0], &w[1], Ordering::Fitting))
    }
}

fn literal_true(j: &PartialInterpretation, i: &PartialInterpretation, l: &GroundLiteral) -> bool {
    j.value_of_literal(l) == TruthValue::True || matches!(*l, GroundLiteral::Pos(a) if i.get(a) == TruthValue::True)
}

fn literal_false(j: &PartialInterpretation, i: &PartialInterpretation, l: &GroundLiteral) -> bool {
    j.value_of_literal(l) == TruthValue::False || matches!(*l, GroundLiteral::Pos(a) if i.get(a) == TruthValue::False)
}

fn theta_atom(j: &PartialInterpretation, i: &PartialInterpretation, gp: &GroundProgram, a: AtomId) -> TruthValue {
    let clauses = gp.clauses_for(a);
    let body = |ci: &usize| &gp.clauses()[*ci].body;
    if clauses.iter().any(|ci| body(ci).iter().all(|l| literal_true(j, i, l))) {
        TruthValue::True
    } else if clauses.iter().all(|ci| body(ci).iter().any(|l| literal_false(j, i, l))) {
        TruthValue::False
    } else {
        TruthValue::Undefined
    }
}

/// One application `Θ_J(I)`.
pub fn theta_step(j: &PartialInterpretation, i: &PartialInterpretation, gp: &GroundProgram) -> PartialInterpretation {
    let values = (0..gp.atom_count()).map(|a| theta_atom(j, i, gp, a)).collect();
    PartialInterpretation::from_values(values)
}

/// For every atom, the heads of the clauses where it occurs positively.
fn positive_users(gp: &GroundProgram) -> Vec<Vec<AtomId>> {
    let mut users = vec![Vec::new(); gp.atom_count()];
    for c in gp.clauses() {
        for l in &c.body {
            if let GroundLiteral::Pos(a) = *l {
                users[a].push(c.head);
            }
        }
    }
    for u in &mut users {
        u.sort_unstable();
        u.dedup();
    }
    users
}

/// `Θ_J↑0, Θ_J↑1, ...` up to and including the first repeated element.
pub fn theta_sequence(j: &PartialInterpretation, gp: &GroundProgram, eval: Evaluation) -> Vec<PartialInterpretation> {
    let n = gp.atom_count();
    let mut seq = vec![PartialInterpretation::all_false(n)];
    match eval {
        Evaluation::Naive => loop {
            let last = seq.last().expect("non-empty");
            let next = theta_step(j, last, gp);
            let done = next == *last;
            seq.push(next);
            if done {
                return seq;
            }
        },
        Evaluation::SemiNaive => {
            let users = positive_users(gp);
            let mut dirty: Vec<AtomId> = (0..n).collect();
            loop {
                let last = seq.last().expect("non-empty");
                let mut next = last.clone();
                let mut changed = Vec::new();
                for &a in &dirty {
                    let v = theta_atom(j, last, gp, a);
                    if v != last.get(a) {
                        next.set(a, v);
                        changed.push(a);
                    }
                }
                seq.push(next);
                if changed.is_empty() {
                    return seq;
                }
                let mut mark = vec![false; n];
                dirty.clear();
                for a in changed {
                    for &h in &users[a] {
                        if !mark[h] {
                            mark[h] = true;
                            dirty.push(h);
                        }
                    }
                }
                dirty.sort_unstable();
            }
        }
    }
}

/// `Θ_J↑ω`.
pub fn theta_lfp(j: &PartialInterpretation, gp: &GroundProgram) -> PartialInterpretation {
    theta_sequence(j, gp, Evaluation::default()).pop().expect("non-empty")
}

/// The well-founded model with its stage trace.
pub fn well_founded_model(gp: &GroundProgram) -> (PartialInterpretation, ThetaTrace) {
    well_founded_model_with(gp, Evaluation::default())
}

pub fn well_founded_model_with(gp: &GroundProgram, eval: Evaluation) -> (PartialInterpretation, ThetaTrace) {
    let mut trace = ThetaTrace {
        stages: vec![PartialInterpretation::undefined(gp.atom_count())],
        inner_lengths: Vec::new(),
        inner_increasing: true,
    };
    loop {
        let current = trace.stages.last().expect("non-empty");
        let seq = theta_sequence(current, gp, eval);
        trace.inner_lengths.push(seq.len() - 1);
        trace.inner_increasing &= seq.windows(2).all(|w| leq(&w[0], &w[1], Ordering::Truth));
        let next = seq.into_iter().last().expect("non-empty");
        if next == *current {
            break;
        }
        debug_assert!(leq(current, &next, Ordering::Fitting), "outer sequence must grow in information");
        trace.stages.push(next);
    }
    (trace.stages.last().expect("non-empty").clone(), trace)
}

/// The least three-valued model of the reduct `P/M`: negative literals take
/// their value in `M`, positive ones are computed bottom-up from all-false.
pub fn reduct_least_model(m: &PartialInterpretation, gp: &GroundProgram) -> PartialInterpretation {
    let mut cur = PartialInterpretation::all_false(gp.atom_count());
    loop {
        let mut next = PartialInterpretation::all_false(gp.atom_count());
        for c in gp.clauses() {
            let body = c
                .body
                .iter()
                .map(|l| match *l {
                    GroundLiteral::Pos(a) => cur.get(a),
                    _ => m.value_of_literal(l),
                })
                .min()
                .unwrap_or(TruthValue::True);
            if body > next.get(c.head) {
                next.set(c.head, body);
            }
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Every partial stable model, i.e. every `M` with `M` the least model of
/// `P/M`, by enumerating all interpretations. The well-founded model is the
/// least of them in the information order.
pub fn partial_stable_models_bruteforce(gp: &GroundProgram, limit: usize) -> Result<Vec<PartialInterpretation>, InterpError> {
    let n = gp.atom_count();
    if n > limit || n > 20 {
        return Err(InterpError::TooLarge { atoms: n, limit: limit.min(20) });
    }
    let digits = [TruthValue::False, TruthValue::Undefined, TruthValue::True];
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut rest = code;
        let values = (0..n)
            .map(|_| {
                let d = digits[rest % 3];
                rest /= 3;
                d
            })
            .collect();
        let m = PartialInterpretation::from_values(values);
        if reduct_least_model(&m, gp) == m {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::{ground_instantiation, relevant_grounding, Window};
    use crate::typecheck::load_program;
    use TruthValue::*;

    fn ground(text: &str, k: usize) -> GroundProgram {
        ground_instantiation(&load_program(text).unwrap(), Window::new(k)).unwrap()
    }

    fn value(gp: &GroundProgram, m: &PartialInterpretation, key: &str) -> TruthValue {
        m.value_of_key(gp, key).unwrap()
    }

    #[test]
    fn first_theta_step() {
        let gp = ground("type p : o. type q : o. p <- ~q. q.", 1);
        let j = PartialInterpretation::undefined(2);
        let i = PartialInterpretation::all_false(2);
        let next = theta_step(&j, &i, &gp);
        assert_eq!(value(&gp, &next, "q"), True);
        assert_eq!(value(&gp, &next, "p"), Undefined);
    }

    #[test]
    fn atoms_without_clauses_are_false() {
        let gp = ground("type p : o. type q : o. p <- q.", 1);
        for j in [PartialInterpretation::undefined(2), PartialInterpretation::from_values(vec![True, True])] {
            let out = theta_step(&j, &PartialInterpretation::undefined(2), &gp);
            assert_eq!(value(&gp, &out, "q"), False);
        }
    }

    #[test]
    fn odd_loop_is_undefined() {
        let gp = ground("type p : o. p <- ~p.", 1);
        let (m, trace) = well_founded_model(&gp);
        assert_eq!(value(&gp, &m, "p"), Undefined);
        assert_eq!(trace.lambda(), 0);
    }

    #[test]
    fn facts_only() {
        let gp = ground("type p : o. type q : i -> o. p. q a. q b.", 1);
        assert_eq!(gp.atom_count(), 3);
        for j in [PartialInterpretation::undefined(3), PartialInterpretation::all_false(3)] {
            assert!(theta_lfp(&j, &gp).values().iter().all(|&v| v == True));
        }
        // unused declarations contribute no atoms
        assert!(gp.lookup("q c").is_none());
    }

    #[test]
    fn counterexample_values() {
        let p = load_program(
            "type s : (o -> o) -> o. type p : o -> o. type q : o -> o. type w : o -> o.
             s Q <- Q (s Q). p R <- R. q R <- ~(w R). w R <- ~R.",
        )
        .unwrap();
        let atom = |t: &str| {
            crate::ast::elaborate(&crate::parser::parse_literal(t).unwrap(), p.signature(), &Default::default())
                .unwrap()
        };
        let gp = relevant_grounding(&p, [atom("s p"), atom("s q")], Window::new(3)).unwrap();
        let m0 = PartialInterpretation::undefined(gp.atom_count());
        let seq = theta_sequence(&m0, &gp, Evaluation::Naive);
        assert!(seq.iter().all(|i| value(&gp, i, "s p") == False));
        let (m, trace) = well_founded_model(&gp);
        assert_eq!(value(&gp, &m, "s p"), False);
        assert_eq!(value(&gp, &m, "p (s p)"), False);
        for key in ["s q", "q (s q)", "w (s q)"] {
            assert_eq!(value(&gp, &m, key), Undefined, "{key}");
        }
        assert!(trace.inner_increasing && trace.outer_increasing());
    }

    #[test]
    fn positive_higher_order_program() {
        let gp = ground(
            "type q : i -> o. type p : (i -> o) -> o. type id : (i -> o) -> i -> o.
             q a. q b. p Q <- Q a. id R X <- R X.",
            2,
        );
        let (m, _) = well_founded_model(&gp);
        assert!(m.is_total());
        for key in ["q a", "q b", "p q", "id q a", "id q b", "p (id q)"] {
            assert_eq!(value(&gp, &m, key), True, "{key}");
        }
    }

    #[test]
    fn least_partial_stable_model_is_the_model() {
        let gp = ground("type p : o. type q : o. type r : o. p <- ~q. q <- ~p. r <- ~r.", 1);
        let fixed = partial_stable_models_bruteforce(&gp, 12).unwrap();
        // p/q: undefined, or one of the two stable choices; r stays undefined
        assert_eq!(fixed.len(), 3);
        let (m, _) = well_founded_model(&gp);
        assert!(fixed.contains(&m));
        assert!(fixed.iter().all(|f| leq(&m, f, Ordering::Fitting)));
    }

    #[test]
    fn positive_loops_are_not_partial_stable() {
        let gp = ground("type p : o. p <- p.", 1);
        let fixed = partial_stable_models_bruteforce(&gp, 12).unwrap();
        assert_eq!(fixed, vec![PartialInterpretation::all_false(1)]);
    }

    #[test]
    fn semi_naive_matches_naive() {
        let gp = ground(
            "type e : i -> i -> o. type r : i -> i -> o. type u : i -> o.
             e a b. e b c. e c a. e c d.
             r X Y <- e X Y. r X Y <- e X Z, r Z Y. u X <- ~(r X X).",
            1,
        );
        let (m1, t1) = well_founded_model_with(&gp, Evaluation::Naive);
        let (m2, t2) = well_founded_model_with(&gp, Evaluation::SemiNaive);
        assert_eq!(m1, m2);
        assert_eq!(t1, t2);
        assert_eq!(value(&gp, &m1, "u d"), True);
        assert_eq!(value(&gp, &m1, "u a"), False);
    }
}
