//! Command-line driver: parse, check, ground, evaluate and compare.
//!
//! Every subcommand produces a report, as JSON or as plain text, and an exit
//! code: 0 when the run succeeded and the checked property holds, 2 when the
//! property fails (non-extensional, unstratifiable, unexpected demo value),
//! 1 for usage, I/O and input errors.

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hoext::ast::Type;
use hoext::demos;
use hoext::ext::{ExtChecker, Semantics, Verdict};
use hoext::grounder::{ground_instantiation, relevant_grounding, GroundProgram, Window};
use hoext::interp::{is_model, minimal_models_bruteforce, Ordering, PartialInterpretation};
use hoext::parser::parse_program_bytes;
use hoext::perfect::{dependencies, localize, perfect_model, stratify, PerfectError};
use hoext::typecheck::{check_program, parse_atoms, Program};
use hoext::wfs::well_founded_model;
use hoext::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_ERROR: i32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    #[default]
    Wfs,
    Perfect,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    #[default]
    Truth,
    Fitting,
}

#[derive(Clone, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Parse and type-check a program.
    Check { input: String },
    /// Print the ground program.
    Ground { input: String },
    /// Well-founded model.
    Wfs { input: String },
    /// Perfect model of a stratified program.
    Perfect { input: String },
    /// Stratify the predicate constants.
    Stratify { input: String },
    /// Check that the model's extensional equalities are reflexive.
    Extcheck {
        input: String,
        /// Model to check.
        #[arg(long, value_enum, default_value_t = ModelKind::Wfs)]
        model: ModelKind,
    },
    /// Minimal models by exhaustive search.
    Minimal {
        input: String,
        #[arg(long, value_enum, default_value_t = OrderArg::Truth)]
        ordering: OrderArg,
    },
    /// Run a bundled program and compare with its known results.
    Demo {
        #[arg(value_parser = ["lemma1", "bezem", "stratified", "subset", "winnow"])]
        name: String,
    },
}

/// Everything a run needs.
#[derive(Clone, Debug, PartialEq, Eq, Parser)]
#[command(name = "hoext", version, about = "Well-founded and perfect models of higher-order logic programs, and their extensionality")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Herbrand universe depth (symbol count of substituted terms).
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub depth: u64,
    /// Comma-separated root atoms; grounding becomes demand-driven.
    #[arg(long, global = true)]
    pub roots: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Largest ground program, in atoms, for exhaustive search.
    #[arg(long, global = true, default_value_t = hoext::interp::DEFAULT_ORACLE_LIMIT)]
    pub oracle_limit: usize,
    /// Largest atom (in symbols) expanded by demand grounding.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, depth: 3, roots: None, format: Format::Json, oracle_limit: 12, budget: None }
    }

    fn window(&self) -> Window {
        let w = Window::new(self.depth as usize);
        match self.budget {
            Some(b) => w.with_atom_budget(b),
            None => w,
        }
    }
}

/// What a run printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: i32, format: Format, json: Value, text: String) -> Self {
        let stdout = match format {
            Format::Json => serde_json::to_string_pretty(&json).expect("serializable") + "\n",
            Format::Text => text,
        };
        Outcome { code, stdout, stderr: String::new() }
    }

    fn error(format: Format, err: &Error) -> Self {
        let diags = diagnostics(err);
        let stderr: String = diags.iter().map(|d| format!("error[{}]: {}\n", d["rule"].as_str().unwrap_or(""), d["message"].as_str().unwrap_or(""))).collect();
        let stdout = match format {
            Format::Json => serde_json::to_string_pretty(&json!({ "ok": false, "errors": diags })).expect("serializable") + "\n",
            Format::Text => String::new(),
        };
        Outcome { code: EXIT_ERROR, stdout, stderr }
    }

    fn usage(message: String) -> Self {
        Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: message }
    }
}

fn pos_json(pos: hoext::ast::Pos) -> Value {
    json!({ "line": pos.line, "column": pos.column })
}

/// One JSON object per error, with the violated rule and a position when
/// there is one.
fn diagnostics(err: &Error) -> Vec<Value> {
    match err {
        Error::Check(errs) => errs
            .0
            .iter()
            .map(|e| json!({ "rule": e.rule(), "message": e.to_string(), "position": pos_json(e.pos()) }))
            .collect(),
        Error::Parse(e) => {
            let rule = match e {
                hoext::parser::ParseError::Syntax { .. } => "SyntaxError",
                hoext::parser::ParseError::DuplicateDeclaration { .. } => "DuplicateDeclaration",
            };
            vec![json!({ "rule": rule, "message": e.to_string(), "position": pos_json(e.pos()) })]
        }
        other => {
            let rule = match other {
                Error::Ast(_) => "IllTyped",
                Error::Ground(_) => "Grounding",
                Error::Interp(_) => "Oracle",
                Error::Perfect(_) => "Stratification",
                Error::Ext(_) => "Extensionality",
                _ => "Error",
            };
            vec![json!({ "rule": rule, "message": other.to_string() })]
        }
    }
}

/// Parses command-line arguments and runs; clap's own errors map to exit 1,
/// `--help` and `--version` to 0.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome::usage(text)
            }
        }
    }
}

fn input_of(cmd: &Command) -> Option<&str> {
    match cmd {
        Command::Check { input }
        | Command::Ground { input }
        | Command::Wfs { input }
        | Command::Perfect { input }
        | Command::Stratify { input }
        | Command::Extcheck { input, .. }
        | Command::Minimal { input, .. } => Some(input),
        Command::Demo { .. } => None,
    }
}

/// Runs a configuration, reading the input file, or stdin for `-`.
pub fn run(cfg: &RunConfig) -> Outcome {
    let Some(path) = input_of(&cfg.command) else {
        return run_source(cfg, b"");
    };
    let mut bytes = Vec::new();
    let read = if path == "-" {
        std::io::stdin().read_to_end(&mut bytes).map(|_| ())
    } else {
        std::fs::read(path).map(|b| bytes = b)
    };
    match read {
        Ok(()) => run_source(cfg, &bytes),
        Err(e) => Outcome::usage(format!("error[Io]: cannot read {path}: {e}\n")),
    }
}

/// Runs a configuration on program text already in memory.
pub fn run_source(cfg: &RunConfig, source: &[u8]) -> Outcome {
    if let Command::Demo { name } = &cfg.command {
        return demo(cfg, name);
    }
    let program = match load(source) {
        Ok(p) => p,
        Err(e) => return Outcome::error(cfg.format, &e),
    };
    let result = match &cfg.command {
        Command::Check { .. } => Ok(check(cfg, &program)),
        Command::Ground { .. } => ground(cfg, &program),
        Command::Wfs { .. } => wfs(cfg, &program),
        Command::Perfect { .. } => perfect(cfg, &program),
        Command::Stratify { .. } => Ok(stratify_cmd(cfg, &program)),
        Command::Extcheck { model, .. } => extcheck(cfg, &program, *model),
        Command::Minimal { ordering, .. } => minimal(cfg, &program, *ordering),
        Command::Demo { .. } => unreachable!("handled above"),
    };
    result.unwrap_or_else(|e| Outcome::error(cfg.format, &e))
}

fn load(source: &[u8]) -> Result<Program, Error> {
    let sp = parse_program_bytes(source)?;
    Ok(check_program(&sp)?)
}

fn grounding(cfg: &RunConfig, program: &Program) -> Result<GroundProgram, Error> {
    Ok(match &cfg.roots {
        Some(r) => relevant_grounding(program, parse_atoms(program, r)?, cfg.window())?,
        None => ground_instantiation(program, cfg.window())?,
    })
}

fn mode(cfg: &RunConfig) -> &'static str {
    if cfg.roots.is_some() {
        "demand"
    } else {
        "exhaustive"
    }
}

fn check(cfg: &RunConfig, program: &Program) -> Outcome {
    let sig = program.signature();
    let decls: Vec<Value> = sig.iter().map(|(n, t)| json!({ "name": n.to_string(), "type": t.to_string() })).collect();
    let clauses: Vec<String> = program.clauses().iter().map(|c| c.to_string()).collect();
    Outcome::report(
        EXIT_OK,
        cfg.format,
        json!({ "ok": true, "declarations": decls, "clauses": clauses }),
        program.to_string(),
    )
}

fn truncated_keys(gp: &GroundProgram) -> Vec<String> {
    gp.truncated().iter().map(|&a| gp.atom(a).key().to_string()).collect()
}

fn tainted_keys(gp: &GroundProgram) -> Vec<String> {
    let mut out: Vec<String> =
        gp.tainted().iter().enumerate().filter(|(_, t)| **t).map(|(a, _)| gp.atom(a).key().to_string()).collect();
    out.sort();
    out
}

fn ground(cfg: &RunConfig, program: &Program) -> Result<Outcome, Error> {
    let gp = grounding(cfg, program)?;
    let mut atoms: Vec<String> = gp.atoms().iter().map(|a| a.key().to_string()).collect();
    atoms.sort();
    let clauses: Vec<String> = gp.clause_set().into_iter().collect();
    Ok(Outcome::report(
        EXIT_OK,
        cfg.format,
        json!({
            "depth": cfg.depth,
            "mode": mode(cfg),
            "atoms": atoms,
            "clauses": clauses,
            "truncated": truncated_keys(&gp),
        }),
        gp.dump(),
    ))
}

fn model_text(m: &PartialInterpretation, gp: &GroundProgram) -> String {
    let mut lines: Vec<String> = (0..gp.atom_count()).map(|a| format!("{} = {}", gp.atom(a).key(), m.get(a))).collect();
    lines.sort();
    lines.into_iter().map(|l| l + "\n").collect()
}

fn wfs(cfg: &RunConfig, program: &Program) -> Result<Outcome, Error> {
    let gp = grounding(cfg, program)?;
    let (m, trace) = well_founded_model(&gp);
    Ok(Outcome::report(
        EXIT_OK,
        cfg.format,
        json!({
            "depth": cfg.depth,
            "mode": mode(cfg),
            "model": m.dump(&gp),
            "stages": trace.lambda(),
            "inner_lengths": trace.inner_lengths,
            "truncated": truncated_keys(&gp),
            "tainted": tainted_keys(&gp),
        }),
        model_text(&m, &gp),
    ))
}

fn unstratifiable(cfg: &RunConfig, e: PerfectError) -> Result<Outcome, Error> {
    match e {
        PerfectError::Unstratifiable { cycle } => {
            let text = format!("not stratified: cycle through negation\n{}", cycle.iter().map(|d| format!("  {d}\n")).collect::<String>());
            Ok(Outcome::report(EXIT_FAILED, cfg.format, json!({ "stratified": false, "cycle": cycle }), text))
        }
        other => Err(other.into()),
    }
}

fn perfect(cfg: &RunConfig, program: &Program) -> Result<Outcome, Error> {
    let strat = match stratify(program) {
        Ok(s) => s,
        Err(e) => return unstratifiable(cfg, e),
    };
    let gp = grounding(cfg, program)?;
    let (m, trace) = perfect_model(&gp, &localize(&strat, &gp)?)?;
    Ok(Outcome::report(
        EXIT_OK,
        cfg.format,
        json!({
            "depth": cfg.depth,
            "mode": mode(cfg),
            "strata": strat.strata,
            "model": m.dump(&gp),
            "inner_lengths": trace.inner_lengths,
            "truncated": truncated_keys(&gp),
            "tainted": tainted_keys(&gp),
        }),
        model_text(&m, &gp),
    ))
}

fn stratify_cmd(cfg: &RunConfig, program: &Program) -> Outcome {
    match stratify(program) {
        Ok(s) => {
            let text: String = s.strata.iter().enumerate().map(|(i, st)| format!("{}: {}\n", i + 1, st.join(" "))).collect();
            Outcome::report(
                EXIT_OK,
                cfg.format,
                json!({ "stratified": true, "strata": s.strata, "dependencies": dependencies(program) }),
                text,
            )
        }
        Err(e) => unstratifiable(cfg, e).unwrap_or_else(|e| Outcome::error(cfg.format, &e)),
    }
}

fn extcheck(cfg: &RunConfig, program: &Program, model: ModelKind) -> Result<Outcome, Error> {
    let semantics = match model {
        ModelKind::Wfs => Semantics::WellFounded,
        ModelKind::Perfect => {
            if let Err(e) = stratify(program) {
                return unstratifiable(cfg, e);
            }
            Semantics::Perfect
        }
    };
    let mut checker = ExtChecker::new(program, cfg.window(), semantics)?;
    if let Some(r) = &cfg.roots {
        checker.add_roots(parse_atoms(program, r)?)?;
    }
    let report = checker.reflexivity_check()?;
    let code = if report.verdict == Verdict::ExtensionalAtDepth { EXIT_OK } else { EXIT_FAILED };
    let mut text = format!("{}\n", verdict_text(report.verdict, report.depth));
    for w in &report.witnesses {
        let args: Vec<String> = w.args.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        text.push_str(&format!(
            "  {} : {} is not related to itself: {} = {} but {} = {} for {}\n",
            w.term,
            w.ty,
            w.left_atom,
            w.left_value,
            w.right_atom,
            w.right_value,
            args.join(" ")
        ));
    }
    for u in &report.unknown {
        text.push_str(&format!("  {} : {} unknown at this depth\n", u.term, u.ty));
    }
    Ok(Outcome::report(code, cfg.format, serde_json::to_value(&report).expect("serializable"), text))
}

fn verdict_text(v: Verdict, k: usize) -> String {
    match v {
        Verdict::ExtensionalAtDepth => format!("extensional at depth {k}"),
        Verdict::NonExtensional => "non-extensional".to_string(),
        Verdict::UnknownAtDepth => format!("unknown at depth {k}"),
    }
}

fn minimal(cfg: &RunConfig, program: &Program, ordering: OrderArg) -> Result<Outcome, Error> {
    let gp = grounding(cfg, program)?;
    let ord = match ordering {
        OrderArg::Truth => Ordering::Truth,
        OrderArg::Fitting => Ordering::Fitting,
    };
    let models = minimal_models_bruteforce(&gp, ord, cfg.oracle_limit)?;
    let (w, _) = well_founded_model(&gp);
    let perfect = stratify(program)
        .ok()
        .and_then(|s| localize(&s, &gp).ok())
        .and_then(|ls| perfect_model(&gp, &ls).ok())
        .map(|(n, _)| models.contains(&n));
    let dumps: Vec<_> = models.iter().map(|m| m.dump(&gp)).collect();
    let mut text = String::new();
    for (i, m) in models.iter().enumerate() {
        text.push_str(&format!("model {}\n{}", i + 1, model_text(m, &gp)));
    }
    text.push_str(&format!("well-founded model minimal: {}\n", models.contains(&w)));
    if let Some(p) = perfect {
        text.push_str(&format!("perfect model minimal: {p}\n"));
    }
    Ok(Outcome::report(
        EXIT_OK,
        cfg.format,
        json!({
            "ordering": match ordering { OrderArg::Truth => "truth", OrderArg::Fitting => "fitting" },
            "atoms": gp.atom_count(),
            "models": dumps,
            "wfs_is_model": is_model(&w, &gp).is_ok(),
            "wfs_is_minimal": models.contains(&w),
            "perfect_is_minimal": perfect,
        }),
        text,
    ))
}

/// One expected value in a demo.
fn expectation(gp: &GroundProgram, m: &PartialInterpretation, key: &str, want: hoext::interp::TruthValue) -> Value {
    let got = m.value_of_key(gp, key).ok();
    json!({ "atom": key, "expected": want, "actual": got, "ok": got == Some(want) })
}

fn demo(cfg: &RunConfig, name: &str) -> Outcome {
    match run_demo(name) {
        Ok((ok, json, text)) => Outcome::report(if ok { EXIT_OK } else { EXIT_FAILED }, cfg.format, json, text),
        Err(e) => Outcome::error(cfg.format, &e),
    }
}

/// Runs a bundled demo: `(all expectations met, JSON report, text report)`.
pub fn run_demo(name: &str) -> Result<(bool, Value, String), Error> {
    let d = demos::demo(name).ok_or_else(|| {
        Error::Interp(hoext::interp::InterpError::UnknownAtom(format!("no demo named `{name}`")))
    })?;
    let program = hoext::typecheck::load_program(d.source)?;
    let window = Window::new(d.depth);
    let gp = if d.roots.is_empty() {
        ground_instantiation(&program, window)?
    } else {
        relevant_grounding(&program, parse_atoms(&program, &d.roots.join(", "))?, window)?
    };
    let (m, _) = well_founded_model(&gp);
    let values: Vec<Value> = d.expected.iter().map(|(k, v)| expectation(&gp, &m, k, *v)).collect();
    let mut ok = values.iter().all(|v| v["ok"] == json!(true));
    let mut text = format!("demo {name} (depth {})\n", d.depth);
    for v in &values {
        text.push_str(&format!(
            "  {} = {}{}\n",
            v["atom"].as_str().unwrap_or(""),
            v["actual"].as_str().map(short).unwrap_or("missing"),
            if v["ok"] == json!(true) { "" } else { "   (unexpected)" }
        ));
    }
    let mut report = json!({ "demo": name, "depth": d.depth, "values": values });

    match name {
        "lemma1" => {
            let oo = Type::arrow(Type::Omicron, Type::Omicron);
            let sig = program.signature();
            let c = |n: &str| hoext::ast::Expr::constant(sig, n).expect("declared");
            let mut checker = ExtChecker::new(&program, window, Semantics::WellFounded)?;
            let pq = checker.ext_equal(&oo, &c("p"), &c("q"))?;
            let ext = checker.reflexivity_check()?;
            let w = ext.witnesses.iter().find(|w| w.term == "s");
            let witnessed = w.is_some_and(|w| w.args == [("p".to_string(), "q".to_string())]);
            ok &= pq && ext.verdict == Verdict::NonExtensional && witnessed;
            text.push_str(&format!("  p ~ q at o -> o: {pq}\n  {}\n", verdict_text(ext.verdict, ext.depth)));
            if let Some(w) = w {
                text.push_str(&format!(
                    "  witness: {} with ({}, {}): {} = {}, {} = {}\n",
                    w.term, w.args[0].0, w.args[0].1, w.left_atom, short(w.left_value.name()), w.right_atom, short(w.right_value.name())
                ));
            }
            report["p_ext_equal_q"] = json!(pq);
            report["extcheck"] = serde_json::to_value(&ext).expect("serializable");
        }
        "stratified" => {
            let strata = stratify(&program)?;
            let second = hoext::typecheck::load_program(demos::UNSTRATIFIED)?;
            let rejected = match stratify(&second) {
                Err(PerfectError::Unstratifiable { cycle }) => Some(cycle),
                _ => None,
            };
            let (n, _) = perfect_model(&gp, &localize(&strata, &gp)?)?;
            let ext = hoext::ext::reflexivity_check(&program, window, Semantics::Perfect)?;
            ok &= strata.strata == [vec!["q".to_string()], vec!["p".to_string()]]
                && rejected.is_some()
                && n == m
                && ext.verdict == Verdict::ExtensionalAtDepth;
            text.push_str(&format!("  strata: {:?}\n", strata.strata));
            text.push_str(&format!("  perfect model equals well-founded model: {}\n", n == m));
            text.push_str(&format!("  {}\n", verdict_text(ext.verdict, ext.depth)));
            match &rejected {
                Some(c) => text.push_str(&format!(
                    "  second program rejected: {}\n",
                    c.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
                )),
                None => text.push_str("  second program unexpectedly stratified\n"),
            }
            report["strata"] = json!(strata.strata);
            report["unstratified_cycle"] = json!(rejected);
            report["perfect_equals_wfs"] = json!(n == m);
            report["extcheck"] = serde_json::to_value(&ext).expect("serializable");
        }
        "bezem" => {
            ok &= m.is_total();
            text.push_str(&format!("  model total: {}\n", m.is_total()));
            report["total"] = json!(m.is_total());
        }
        _ => {}
    }
    report["ok"] = json!(ok);
    text.push_str(if ok { "as expected\n" } else { "MISMATCH\n" });
    Ok((ok, report, text))
}

/// `undefined` prints as `0`.
fn short(name: &str) -> &str {
    if name == "undefined" {
        "0"
    } else {
        name
    }
}
