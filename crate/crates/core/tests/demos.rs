use hoext::ast::Expr;
use hoext::demos::{self, DEMOS};
use hoext::grounder::{ground_instantiation, relevant_grounding, Window};
use hoext::parser::parse_literal;
use hoext::typecheck::{load_program, Program};
use hoext::wfs::well_founded_model;

fn atom(p: &Program, text: &str) -> Expr {
    hoext::ast::elaborate(&parse_literal(text).unwrap(), p.signature(), &Default::default()).unwrap()
}

#[test]
fn bundled_demos_produce_their_expected_values() {
    for d in DEMOS {
        let p = load_program(d.source).unwrap();
        let w = Window::new(d.depth);
        let gp = if d.roots.is_empty() {
            ground_instantiation(&p, w).unwrap()
        } else {
            relevant_grounding(&p, d.roots.iter().map(|r| atom(&p, r)), w).unwrap()
        };
        let (m, _) = well_founded_model(&gp);
        for (key, v) in d.expected {
            assert_eq!(m.value_of_key(&gp, key).unwrap(), *v, "{}: {key}", d.name);
        }
    }
}

#[test]
fn illegal_programs_name_their_rule() {
    for (src, rule) in demos::ILLEGAL {
        let err = match load_program(src) {
            Err(hoext::Error::Check(e)) => e,
            other => panic!("{src}: {other:?}"),
        };
        assert!(err.0.iter().any(|e| e.rule() == *rule), "{src}: {err}");
    }
}
