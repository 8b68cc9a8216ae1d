//! Random program generators for property tests and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::perfect::stratify;
use crate::typecheck::{load_program, Program};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub individuals: usize,
    /// Emit a unary and a binary function symbol.
    pub functions: bool,
    pub first_order: usize,
    pub higher_order: usize,
    pub max_clauses: usize,
    pub max_body: usize,
    pub negation: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            individuals: 2,
            functions: false,
            first_order: 4,
            higher_order: 2,
            max_clauses: 8,
            max_body: 3,
            negation: 0.3,
        }
    }
}

#[derive(Clone, Debug)]
struct Pred {
    name: String,
    /// Parameter types in concrete syntax.
    params: Vec<&'static str>,
}

impl Pred {
    fn ty(&self) -> String {
        let mut s = String::new();
        for p in &self.params {
            if p.contains("->") {
                s.push_str(&format!("({p}) -> "));
            } else {
                s.push_str(&format!("{p} -> "));
            }
        }
        s.push('o');
        s
    }
}

const HO_SHAPES: &[&[&str]] = &[&["i -> o"], &["i -> o", "i"], &["i -> o", "i -> o"], &["o"]];

struct Gen<'a, R> {
    rng: &'a mut R,
    cfg: &'a GenConfig,
    preds: Vec<Pred>,
    consts: Vec<String>,
}

impl<R: Rng> Gen<'_, R> {
    fn individual(&mut self, vars: &mut Vec<String>, depth: usize) -> String {
        let roll = self.rng.gen_range(0..10);
        if self.cfg.functions && depth > 0 && roll == 0 {
            return format!("(f {})", self.individual(vars, depth - 1));
        }
        if self.cfg.functions && depth > 0 && roll == 1 {
            let a = self.individual(vars, depth - 1);
            return format!("(g {a} {})", self.individual(vars, depth - 1));
        }
        if roll < 6 {
            let fresh = format!("Y{}", vars.len());
            let v = if vars.is_empty() || self.rng.gen_bool(0.3) { fresh } else { vars.choose(self.rng).unwrap().clone() };
            if !vars.contains(&v) {
                vars.push(v.clone());
            }
            v
        } else {
            self.consts.choose(self.rng).unwrap().clone()
        }
    }

    /// A closed term of type `i -> o` built from constants.
    fn unary_pred_term(&mut self) -> Option<String> {
        let mut options = Vec::new();
        for p in &self.preds {
            match p.params.as_slice() {
                ["i"] => options.push(p.name.clone()),
                ["i", "i"] => options.push(format!("({} {})", p.name, self.consts[0])),
                _ => {}
            }
        }
        options.choose(self.rng).cloned()
    }

    /// An atom over `formals` (name, type) and fresh ι variables.
    fn atom(&mut self, formals: &[(String, &'static str)], vars: &mut Vec<String>) -> Option<String> {
        let pvars: Vec<&(String, &str)> = formals.iter().filter(|(_, t)| *t != "i").collect();
        if !pvars.is_empty() && self.rng.gen_bool(0.4) {
            let (v, t) = pvars.choose(self.rng).unwrap();
            return Some(match *t {
                "o" => v.clone(),
                _ => format!("{v} {}", self.individual(vars, 1)),
            });
        }
        let p = self.preds.choose(self.rng)?.clone();
        let mut s = p.name.clone();
        for t in &p.params {
            let arg = match *t {
                "i" => self.individual(vars, 1),
                "i -> o" => {
                    let own: Vec<&String> = formals.iter().filter(|(_, ft)| *ft == "i -> o").map(|(n, _)| n).collect();
                    if !own.is_empty() && self.rng.gen_bool(0.5) {
                        own.choose(self.rng).unwrap().to_string()
                    } else {
                        self.unary_pred_term()?
                    }
                }
                "o" => {
                    let q = self.preds.iter().filter(|q| q.params.is_empty()).collect::<Vec<_>>();
                    q.choose(self.rng)?.name.clone()
                }
                _ => unreachable!(),
            };
            s.push(' ');
            s.push_str(&arg);
        }
        Some(s)
    }

    fn clause(&mut self, head: &Pred) -> Option<String> {
        let formals: Vec<(String, &'static str)> = head
            .params
            .iter()
            .enumerate()
            .map(|(i, t)| (if *t == "i" { format!("X{i}") } else { format!("Q{i}") }, *t))
            .collect();
        let mut vars: Vec<String> = formals.iter().filter(|(_, t)| *t == "i").map(|(n, _)| n.clone()).collect();
        let mut s = head.name.clone();
        for (n, _) in &formals {
            s.push(' ');
            s.push_str(n);
        }
        let n = self.rng.gen_range(0..=self.cfg.max_body);
        let mut body = Vec::new();
        for _ in 0..n {
            if self.rng.gen_bool(0.1) {
                let a = self.individual(&mut vars, 1);
                let b = self.individual(&mut vars, 1);
                body.push(format!("{a} = {b}"));
                continue;
            }
            let a = self.atom(&formals, &mut vars)?;
            if self.rng.gen_bool(self.cfg.negation) {
                body.push(format!("~({a})"));
            } else {
                body.push(a);
            }
        }
        // head variables must be typed by the body or not at all; unused
        // ι formals are fine, they range over the universe
        if !body.is_empty() {
            s.push_str(" <- ");
            s.push_str(&body.join(", "));
        }
        s.push('.');
        Some(s)
    }
}

/// Source text of a random program. It is meant to type-check but may fail
/// to, e.g. when a predicate variable ends up unused; callers filter.
pub fn random_program_text<R: Rng>(rng: &mut R, cfg: &GenConfig) -> String {
    let consts: Vec<String> = (0..cfg.individuals.max(1)).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut preds = Vec::new();
    for i in 0..cfg.first_order {
        let arity = rng.gen_range(0..=2);
        preds.push(Pred { name: format!("p{i}"), params: vec!["i"; arity] });
    }
    for i in 0..cfg.higher_order {
        preds.push(Pred { name: format!("h{i}"), params: HO_SHAPES.choose(rng).unwrap().to_vec() });
    }
    let mut out = String::new();
    if cfg.functions {
        out.push_str("type f : i -> i.\ntype g : i -> i -> i.\n");
    }
    for p in &preds {
        out.push_str(&format!("type {} : {}.\n", p.name, p.ty()));
    }
    let mut g = Gen { rng, cfg, preds: preds.clone(), consts: consts.clone() };
    // a few facts so that models are not trivially empty
    for p in preds.iter().filter(|p| p.params.iter().all(|t| *t == "i")) {
        if g.rng.gen_bool(0.6) {
            let args: Vec<String> = p.params.iter().map(|_| consts.choose(g.rng).unwrap().clone()).collect();
            let mut s = p.name.clone();
            for a in args {
                s.push(' ');
                s.push_str(&a);
            }
            out.push_str(&s);
            out.push_str(".\n");
        }
    }
    let n = g.rng.gen_range(1..=cfg.max_clauses);
    for _ in 0..n {
        let head = preds.choose(g.rng).unwrap().clone();
        if let Some(c) = g.clause(&head) {
            out.push_str(&c);
            out.push('\n');
        }
    }
    out
}

/// A random program that type-checks.
pub fn random_program<R: Rng>(rng: &mut R, cfg: &GenConfig) -> (String, Program) {
    loop {
        let text = random_program_text(rng, cfg);
        if let Ok(p) = load_program(&text) {
            return (text, p);
        }
    }
}

/// A random stratified program with at most `max_strata` strata that uses
/// negation at least once.
pub fn random_stratified_program<R: Rng>(rng: &mut R, cfg: &GenConfig, max_strata: usize) -> (String, Program) {
    loop {
        let (text, p) = random_program(rng, cfg);
        if !p.clauses().iter().any(|c| c.body.iter().any(|l| matches!(l.kind(), crate::ast::ExprKind::Neg(_)))) {
            continue;
        }
        if let Ok(s) = stratify(&p) {
            if s.len() <= max_strata {
                return (text, p);
            }
        }
    }
}

/// Random bytes biased towards the program syntax, for fuzzing.
pub fn fuzz_input<R: Rng>(rng: &mut R, seed_text: &str) -> Vec<u8> {
    const TOKENS: &[&str] =
        &["type", " ", ":", "->", "(", ")", ".", "<-", ",", "~", "=", "%", "\n", "i", "o", "p", "Q", "X", "a", "é", "\0"];
    match rng.gen_range(0..3) {
        0 => (0..rng.gen_range(0..64)).map(|_| rng.gen()).collect(),
        1 => {
            let n = rng.gen_range(0..40);
            (0..n).map(|_| *TOKENS.choose(rng).unwrap()).collect::<String>().into_bytes()
        }
        _ => {
            let mut b = seed_text.as_bytes().to_vec();
            for _ in 0..rng.gen_range(1..6) {
                if b.is_empty() {
                    break;
                }
                let i = rng.gen_range(0..b.len());
                match rng.gen_range(0..3) {
                    0 => {
                        b.remove(i);
                    }
                    1 => b.insert(i, TOKENS.choose(rng).unwrap().as_bytes()[0]),
                    _ => b[i] = rng.gen(),
                }
            }
            b
        }
    }
}

/// A program file with optional `% depth: k` and `% roots: a, b` header
/// comments. Without a depth header the grounding uses depth 1; without roots
/// it is exhaustive.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub text: String,
    pub depth: usize,
    pub roots: Option<String>,
}

impl CorpusEntry {
    pub fn parse(name: &str, text: &str) -> Self {
        let mut depth = 1;
        let mut roots = None;
        for line in text.lines() {
            let Some(c) = line.trim().strip_prefix('%') else { continue };
            if let Some(d) = c.trim().strip_prefix("depth:") {
                depth = d.trim().parse().unwrap_or(depth);
            } else if let Some(r) = c.trim().strip_prefix("roots:") {
                roots = Some(r.trim().to_string());
            }
        }
        CorpusEntry { name: name.to_string(), text: text.to_string(), depth, roots }
    }

    pub fn ground(&self) -> Result<(Program, crate::grounder::GroundProgram), crate::Error> {
        use crate::grounder::{ground_instantiation, relevant_grounding, Window};
        let p = load_program(&self.text)?;
        let w = Window::new(self.depth);
        let gp = match &self.roots {
            Some(r) => relevant_grounding(&p, crate::typecheck::parse_atoms(&p, r)?, w)?,
            None => ground_instantiation(&p, w)?,
        };
        Ok((p, gp))
    }
}

/// Every `.hop` file in `dir`, sorted by name.
pub fn load_corpus(dir: &std::path::Path) -> std::io::Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "hop") {
            let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            out.push(CorpusEntry::parse(&name, &std::fs::read_to_string(&path)?));
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}
