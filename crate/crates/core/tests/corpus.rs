use std::path::Path;

use hoext::interp::{is_model, minimal_models_bruteforce, leq, Ordering, DEFAULT_ORACLE_LIMIT};
use hoext::perfect::{localize, perfect_model, stratify};
use hoext::testkit::load_corpus;
use hoext::wfs::{partial_stable_models_bruteforce, well_founded_model, well_founded_model_with, Evaluation};

#[test]
fn corpus_models_against_the_oracle() {
    let corpus = load_corpus(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")).unwrap();
    assert!(corpus.len() >= 20);
    for e in &corpus {
        let (p, gp) = e.ground().unwrap_or_else(|err| panic!("{}: {err}", e.name));
        assert!(gp.atom_count() <= DEFAULT_ORACLE_LIMIT, "{}: {} atoms", e.name, gp.atom_count());
        let (m, trace) = well_founded_model(&gp);
        assert_eq!((m.clone(), trace.clone()), well_founded_model_with(&gp, Evaluation::Naive), "{}", e.name);
        assert!(trace.inner_increasing && trace.outer_increasing(), "{}", e.name);
        assert!(is_model(&m, &gp).is_ok(), "{}", e.name);
        let t_min = minimal_models_bruteforce(&gp, Ordering::Truth, DEFAULT_ORACLE_LIMIT).unwrap();
        assert!(t_min.contains(&m), "{}: well-founded model not truth-minimal", e.name);
        let fixed = partial_stable_models_bruteforce(&gp, DEFAULT_ORACLE_LIMIT).unwrap();
        assert!(fixed.contains(&m) && fixed.iter().all(|f| leq(&m, f, Ordering::Fitting)), "{}", e.name);
        if let Ok(s) = stratify(&p) {
            let (n, _) = perfect_model(&gp, &localize(&s, &gp).unwrap()).unwrap();
            assert_eq!(n, m, "{}", e.name);
            assert!(t_min.contains(&n), "{}", e.name);
        }
    }
}
