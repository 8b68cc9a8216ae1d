use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hoext::ast::{apply_substitution, Expr, Substitution, Type, Var};
use hoext::ext::{reflexivity_check, Ext, ExtChecker, Semantics, Verdict};
use hoext::grounder::{ground_instantiation, herbrand_universe, GroundLiteral, GroundProgram, Window};
use hoext::interp::{is_model, leq, Ordering, PartialInterpretation, TruthValue};
use hoext::parser::parse_program_bytes;
use hoext::testkit::{random_program, GenConfig};
use hoext::typecheck::{check_program, load_program};
use hoext::wfs::{reduct_least_model, well_founded_model, well_founded_model_with, Evaluation};

fn truth_value() -> impl Strategy<Value = TruthValue> {
    prop_oneof![Just(TruthValue::False), Just(TruthValue::Undefined), Just(TruthValue::True)]
}

fn interp(n: usize) -> impl Strategy<Value = PartialInterpretation> {
    proptest::collection::vec(truth_value(), n).prop_map(PartialInterpretation::from_values)
}

fn generated(seed: u64, cfg: &GenConfig) -> hoext::typecheck::Program {
    random_program(&mut ChaCha8Rng::seed_from_u64(seed), cfg).1
}

/// Ground terms of type ι over `a`, `b`, `f`, `g`.
fn term() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![Just(Expr::ind_const("a")), Just(Expr::ind_const("b"))];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Expr::fun_app("f", vec![t]).unwrap()),
            (inner.clone(), inner).prop_map(|(s, t)| Expr::fun_app("g", vec![s, t]).unwrap()),
        ]
    })
}

fn open_term(vars: Vec<Var>) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::ind_const("a")),
        proptest::sample::select(vars).prop_map(|v| Expr::var(&v).unwrap()),
    ]
    .boxed();
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Expr::fun_app("f", vec![t]).unwrap()),
            (inner.clone(), inner).prop_map(|(s, t)| Expr::fun_app("g", vec![s, t]).unwrap()),
        ]
    })
}

/// The alternating fixpoint: true atoms are the least fixpoint of `Γ²`,
/// false atoms are those outside `Γ` of it.
fn alternating_fixpoint(gp: &GroundProgram) -> PartialInterpretation {
    let n = gp.atom_count();
    let gamma = |i: &PartialInterpretation| reduct_least_model(i, gp);
    let mut t = PartialInterpretation::all_false(n);
    loop {
        let next = gamma(&gamma(&t));
        if next == t {
            break;
        }
        t = next;
    }
    let upper = gamma(&t);
    let values = (0..n)
        .map(|a| match (t.get(a), upper.get(a)) {
            (TruthValue::True, _) => TruthValue::True,
            (_, TruthValue::False) => TruthValue::False,
            _ => TruthValue::Undefined,
        })
        .collect();
    PartialInterpretation::from_values(values)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_applies_in_sequence(e in open_term(vec![Var::new("X", Type::Iota), Var::new("Y", Type::Iota)]),
                                       s in term(), t in term(), u in open_term(vec![Var::new("Y", Type::Iota)])) {
        let th1 = Substitution::new().with(Var::new("X", Type::Iota), u).unwrap();
        let th2 = Substitution::new().with(Var::new("Y", Type::Iota), s).unwrap()
            .with(Var::new("X", Type::Iota), t).unwrap();
        let seq = apply_substitution(&apply_substitution(&e, &th1).unwrap(), &th2).unwrap();
        let once = apply_substitution(&e, &th1.compose(&th2).unwrap()).unwrap();
        prop_assert_eq!(seq.clone(), once);
        prop_assert!(seq.is_ground());
        prop_assert_eq!(seq.ty(), &Type::Iota);
    }

    #[test]
    fn orderings_are_partial_orders(a in interp(5), b in interp(5), c in interp(5)) {
        for ord in [Ordering::Truth, Ordering::Fitting] {
            prop_assert!(leq(&a, &a, ord));
            if leq(&a, &b, ord) && leq(&b, &a, ord) {
                prop_assert_eq!(&a, &b);
            }
            if leq(&a, &b, ord) && leq(&b, &c, ord) {
                prop_assert!(leq(&a, &c, ord));
            }
        }
    }

    #[test]
    fn universes_grow_with_depth(seed in any::<u64>()) {
        let cfg = GenConfig { functions: true, ..GenConfig::default() };
        let p = generated(seed, &cfg);
        let types = [Type::Iota, Type::Omicron, Type::arrow(Type::Iota, Type::Omicron)];
        for ty in &types {
            let mut prev: Vec<Expr> = Vec::new();
            for k in 1..=3 {
                let u = herbrand_universe(&p, ty, k).unwrap();
                prop_assert!(prev.iter().all(|e| u.contains(e)));
                prop_assert!(u.iter().all(|e| e.size() <= k && e.ty() == ty && e.is_ground()));
                prev = u;
            }
        }
    }

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let cfg = GenConfig { functions: true, ..GenConfig::default() };
        let p = generated(seed, &cfg);
        let printed = p.to_string();
        let again = load_program(&printed).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn front_end_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        if let Ok(sp) = parse_program_bytes(&bytes) {
            let _ = check_program(&sp);
        }
    }

    #[test]
    fn well_founded_model_agrees_with_alternating_fixpoint(seed in any::<u64>()) {
        let p = generated(seed, &GenConfig::default());
        let gp = ground_instantiation(&p, Window::new(2)).unwrap();
        let (m, trace) = well_founded_model(&gp);
        prop_assert_eq!(&m, &alternating_fixpoint(&gp));
        prop_assert!(is_model(&m, &gp).is_ok());
        prop_assert!(trace.inner_increasing && trace.outer_increasing());
        let (naive, naive_trace) = well_founded_model_with(&gp, Evaluation::Naive);
        prop_assert_eq!(m, naive);
        prop_assert_eq!(trace, naive_trace);
    }

    #[test]
    fn ext_relations_are_partial_equivalences(seed in any::<u64>()) {
        let p = generated(seed, &GenConfig::default());
        let mut c = ExtChecker::new(&p, Window::new(2), Semantics::WellFounded).unwrap();
        for ty in hoext::ext::argument_types(&p) {
            let rel = c.relation(&ty).unwrap().clone();
            let n = rel.universe.len();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(rel.get(i, j), rel.get(j, i));
                    for k in 0..n {
                        if rel.get(i, j) == Ext::Equal && rel.get(j, k) == Ext::Equal {
                            prop_assert_eq!(rel.get(i, k), Ext::Equal);
                        }
                    }
                }
            }
            if ty == Type::Iota {
                for i in 0..n {
                    for j in 0..n {
                        prop_assert_eq!(rel.get(i, j) == Ext::Equal, i == j);
                    }
                }
            }
        }
    }

    #[test]
    fn refutations_persist_at_larger_depths(seed in any::<u64>()) {
        let p = generated(seed, &GenConfig::default());
        let r2 = reflexivity_check(&p, Window::new(2), Semantics::WellFounded).unwrap();
        if r2.verdict == Verdict::NonExtensional {
            let r3 = reflexivity_check(&p, Window::new(3), Semantics::WellFounded).unwrap();
            prop_assert_eq!(r3.verdict, Verdict::NonExtensional);
        }
    }
}

#[test]
fn witnesses_replay() {
    let p = load_program(hoext::demos::COUNTEREXAMPLE).unwrap();
    let r = reflexivity_check(&p, Window::new(3), Semantics::WellFounded).unwrap();
    let roots: Vec<String> = r.witnesses.iter().flat_map(|w| [w.left_atom.clone(), w.right_atom.clone()]).collect();
    let atoms = hoext::typecheck::parse_atoms(&p, &roots.join(", ")).unwrap();
    let gp = hoext::grounder::relevant_grounding(&p, atoms, Window::new(3)).unwrap();
    let (m, _) = well_founded_model(&gp);
    for w in &r.witnesses {
        assert_eq!(m.value_of_key(&gp, &w.left_atom).unwrap(), w.left_value);
        assert_eq!(m.value_of_key(&gp, &w.right_atom).unwrap(), w.right_value);
        assert_ne!(w.left_value, w.right_value);
    }
}

#[test]
fn ground_literals_are_over_known_atoms() {
    let p = load_program(hoext::demos::POSITIVE).unwrap();
    let gp = ground_instantiation(&p, Window::new(2)).unwrap();
    for c in gp.clauses() {
        assert!(c.head < gp.atom_count());
        for l in &c.body {
            if let GroundLiteral::Pos(a) | GroundLiteral::Neg(a) = *l {
                assert!(a < gp.atom_count());
            }
        }
    }
}
