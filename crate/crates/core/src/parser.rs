//! Concrete syntax front end.
//!
//! ```text
//! program := (decl | clause)*
//! decl    := "type" name ":" type "."
//! type    := "i" | "o" | "(" type ")" | type "->" type      (right-assoc)
//! clause  := atom ("<-" literal ("," literal)*)? "."
//! literal := atom | "~" atom | term "=" term
//! ```
//!
//! Application is juxtaposition, left associative. `%` starts a comment that
//! runs to the end of the line.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::ast::{is_variable_name, Pos, RawExpr, RawKind, Type};

/// Maximum parenthesis nesting accepted before reporting an error.
const MAX_NESTING: usize = 256;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { message: String, pos: Pos },
    #[error("{pos}: duplicate declaration of `{name}` (first declared at {first})")]
    DuplicateDeclaration { name: String, pos: Pos, first: Pos },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::DuplicateDeclaration { pos, .. } => *pos,
        }
    }
}

/// `type name : ty.`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declaration {
    pub name: String,
    pub ty: Type,
    pub pos: Pos,
}

/// A clause before type checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawClause {
    pub head: RawExpr,
    pub body: Vec<RawExpr>,
    pub pos: Pos,
}

/// Parsed program text: declarations and untyped clauses, in source order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceProgram {
    pub declarations: Vec<Declaration>,
    pub clauses: Vec<RawClause>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Arrow,
    LParen,
    RParen,
    Dot,
    Comma,
    If,
    Tilde,
    Equals,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::If => f.write_str("`<-`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Equals => f.write_str("`=`"),
        }
    }
}

fn syntax(message: impl Into<String>, pos: Pos) -> ParseError {
    ParseError::Syntax { message: message.into(), pos }
}

fn lex(text: &str) -> Result<(Vec<(Tok, Pos)>, Pos), ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1u32, 1u32);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '%' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' || c == '\'' {
                    s.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        bump(&mut chars);
        let tok = match c {
            ':' => Tok::Colon,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '.' => Tok::Dot,
            ',' => Tok::Comma,
            '~' => Tok::Tilde,
            '=' => Tok::Equals,
            '-' if chars.peek() == Some(&'>') => {
                bump(&mut chars);
                Tok::Arrow
            }
            '<' if chars.peek() == Some(&'-') => {
                bump(&mut chars);
                Tok::If
            }
            other => return Err(syntax(format!("unexpected character {other:?}"), pos)),
        };
        out.push((tok, pos));
    }
    Ok((out, Pos { line, column }))
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
    depth: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let (toks, end) = lex(text)?;
        Ok(Parser { toks, at: 0, end, depth: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => syntax(format!("expected {wanted}, found {t}"), self.pos()),
            None => syntax(format!("expected {wanted}, found end of input"), self.pos()),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<Pos, ParseError> {
        if self.peek() == Some(&tok) {
            Ok(self.next().map(|(_, p)| p).unwrap_or(self.end))
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(syntax("parentheses nested too deeply", self.pos()));
        }
        Ok(())
    }

    fn program(&mut self) -> Result<SourceProgram, ParseError> {
        let mut sp = SourceProgram::default();
        let mut seen: HashMap<String, Pos> = HashMap::new();
        while self.peek().is_some() {
            if matches!(self.peek(), Some(Tok::Ident(s)) if s == "type") {
                let decl = self.declaration()?;
                if let Some(first) = seen.get(&decl.name) {
                    return Err(ParseError::DuplicateDeclaration { name: decl.name, pos: decl.pos, first: *first });
                }
                seen.insert(decl.name.clone(), decl.pos);
                sp.declarations.push(decl);
            } else {
                sp.clauses.push(self.clause()?);
            }
        }
        Ok(sp)
    }

    fn declaration(&mut self) -> Result<Declaration, ParseError> {
        self.next();
        let pos = self.pos();
        let name = match self.peek() {
            Some(Tok::Ident(n)) if n != "type" => n.clone(),
            _ => return Err(self.unexpected("a symbol name")),
        };
        self.next();
        if is_variable_name(&name) {
            return Err(syntax(format!("cannot declare `{name}`: uppercase names are variables"), pos));
        }
        self.expect(Tok::Colon, "`:`")?;
        let ty = self.ty()?;
        self.expect(Tok::Dot, "`.` after declaration")?;
        Ok(Declaration { name, ty, pos })
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let arg = self.atomic_ty()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.next();
            self.enter()?;
            let res = self.ty();
            self.depth -= 1;
            Ok(Type::arrow(arg, res?))
        } else {
            Ok(arg)
        }
    }

    fn atomic_ty(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == "i" => {
                self.next();
                Ok(Type::Iota)
            }
            Some(Tok::Ident(s)) if s == "o" => {
                self.next();
                Ok(Type::Omicron)
            }
            Some(Tok::LParen) => {
                self.next();
                self.enter()?;
                let t = self.ty();
                self.depth -= 1;
                let t = t?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.unexpected("a type (`i`, `o` or `(`)")),
        }
    }

    fn clause(&mut self) -> Result<RawClause, ParseError> {
        let pos = self.pos();
        let head = self.spine()?;
        let mut body = Vec::new();
        if self.peek() == Some(&Tok::If) {
            self.next();
            if self.peek() != Some(&Tok::Dot) {
                body.push(self.literal()?);
                while self.peek() == Some(&Tok::Comma) {
                    self.next();
                    body.push(self.literal()?);
                }
            }
        }
        self.expect(Tok::Dot, "`.` at end of clause")?;
        Ok(RawClause { head, body, pos })
    }

    fn literal(&mut self) -> Result<RawExpr, ParseError> {
        let pos = self.pos();
        if self.peek() == Some(&Tok::Tilde) {
            self.next();
            let atom = self.spine()?;
            return Ok(RawExpr { kind: RawKind::Neg(Box::new(atom)), pos });
        }
        let left = self.spine()?;
        if self.peek() == Some(&Tok::Equals) {
            self.next();
            let right = self.spine()?;
            return Ok(RawExpr { kind: RawKind::Eq(Box::new(left), Box::new(right)), pos });
        }
        Ok(left)
    }

    fn spine(&mut self) -> Result<RawExpr, ParseError> {
        let mut acc = self.primary()?;
        while matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::LParen)) {
            let arg = self.primary()?;
            acc = RawExpr::app(acc, arg);
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<RawExpr, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s != "type" => {
                let (tok, pos) = self.next().expect("peeked");
                let Tok::Ident(name) = tok else { unreachable!() };
                Ok(RawExpr::name(name, pos))
            }
            Some(Tok::LParen) => {
                let open = self.pos();
                self.next();
                self.enter()?;
                let inner = self.spine();
                self.depth -= 1;
                let mut inner = inner?;
                self.expect(Tok::RParen, "`)`")?;
                // keep the position of the opening parenthesis for diagnostics
                if matches!(inner.kind, RawKind::Name(_)) {
                    inner.pos = open;
                }
                Ok(inner)
            }
            _ => Err(self.unexpected("a name or `(`")),
        }
    }
}

/// Parses a whole program.
pub fn parse_program(text: &str) -> Result<SourceProgram, ParseError> {
    Parser::new(text)?.program()
}

/// Parses raw bytes; invalid UTF-8 is reported as a syntax error.
pub fn parse_program_bytes(bytes: &[u8]) -> Result<SourceProgram, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_program(text),
        Err(e) => {
            let prefix = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let line = prefix.matches('\n').count() as u32 + 1;
            let column = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u32 + 1;
            Err(syntax("invalid UTF-8", Pos { line, column }))
        }
    }
}

/// Parses a type such as `(o -> o) -> o`.
pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of type"));
    }
    Ok(t)
}

/// Parses a single literal (used for atom lists given on the command line).
pub fn parse_literal(text: &str) -> Result<RawExpr, ParseError> {
    let mut p = Parser::new(text)?;
    let lit = p.literal()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of expression"));
    }
    Ok(lit)
}

/// Parses a comma-separated list of atoms, e.g. `s p, s q`.
pub fn parse_atom_list(text: &str) -> Result<Vec<RawExpr>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    if p.peek().is_none() {
        return Ok(out);
    }
    out.push(p.spine()?);
    while p.peek() == Some(&Tok::Comma) {
        p.next();
        out.push(p.spine()?);
    }
    if p.peek().is_some() {
        return Err(p.unexpected("`,` or end of list"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_declaration_one_clause() {
        let sp = parse_program("type p : o -> o.  p R <- R.").unwrap();
        assert_eq!(sp.declarations.len(), 1);
        assert_eq!(sp.declarations[0].ty, Type::arrow(Type::Omicron, Type::Omicron));
        assert_eq!(sp.clauses.len(), 1);
        assert_eq!(sp.clauses[0].body.len(), 1);
    }

    #[test]
    fn empty_text() {
        assert_eq!(parse_program("").unwrap(), SourceProgram::default());
        assert_eq!(parse_program("  % only a comment\n").unwrap(), SourceProgram::default());
    }

    #[test]
    fn negative_literal() {
        let sp = parse_program("subset S1 S2 <- ~(nonsubset S1 S2).").unwrap();
        assert_eq!(sp.clauses.len(), 1);
        let body = &sp.clauses[0].body;
        assert_eq!(body.len(), 1);
        let RawKind::Neg(atom) = &body[0].kind else { panic!("expected negation") };
        let (head, args) = atom.spine();
        assert_eq!(head.kind, RawKind::Name("nonsubset".into()));
        assert_eq!(args.len(), 2);
    }

    #[test]
    fn equality_literal() {
        let sp = parse_program("q X <- X = a.").unwrap();
        assert!(matches!(sp.clauses[0].body[0].kind, RawKind::Eq(..)));
    }

    #[test]
    fn empty_body_after_arrow() {
        let sp = parse_program("p <- .").unwrap();
        assert!(sp.clauses[0].body.is_empty());
    }

    #[test]
    fn types() {
        let oo = Type::arrow(Type::Omicron, Type::Omicron);
        assert_eq!(parse_type("(o -> o) -> o").unwrap(), Type::arrow(oo, Type::Omicron));
        assert_eq!(parse_type("i").unwrap(), Type::Iota);
        assert_eq!(parse_type("i -> i -> i").unwrap(), Type::function(2));
        assert_eq!(
            parse_type("i -> i -> o").unwrap(),
            Type::arrow(Type::Iota, Type::arrow(Type::Iota, Type::Omicron))
        );
        assert!(parse_type("i ->").is_err());
        assert!(parse_type("x").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_program("p a\nq <- r ) .").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 2, column: 8 });
        let err = parse_program("p # q.").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 1, column: 3 });
        let err = parse_program("p a").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 1, column: 4 });
    }

    #[test]
    fn duplicate_declaration() {
        let err = parse_program("type p : o.\ntype p : o -> o.").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateDeclaration { ref name, .. } if name == "p"));
    }

    #[test]
    fn cannot_declare_variables() {
        assert!(parse_program("type P : o.").is_err());
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let text = format!("p {}a{}.", "(".repeat(10_000), ")".repeat(10_000));
        assert!(parse_program(&text).is_err());
        let ty = format!("type p : {}o{}.", "(".repeat(10_000), ")".repeat(10_000));
        assert!(parse_program(&ty).is_err());
    }

    #[test]
    fn invalid_utf8() {
        let err = parse_program_bytes(b"p a.\nq \xff.").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 2, column: 3 });
    }

    #[test]
    fn atom_lists() {
        let atoms = parse_atom_list("s p, s q").unwrap();
        assert_eq!(atoms.len(), 2);
        assert!(parse_atom_list("").unwrap().is_empty());
        assert!(parse_atom_list("s p,").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn never_panics_on_arbitrary_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
            let _ = parse_program_bytes(&bytes);
        }

        #[test]
        fn never_panics_on_token_soup(s in "[a-zA-Z_ ().,:~=%<>\\-\n]{0,120}") {
            if let Err(e) = parse_program(&s) {
                prop_assert!(e.pos().line >= 1 && e.pos().column >= 1);
            }
        }
    }
}
