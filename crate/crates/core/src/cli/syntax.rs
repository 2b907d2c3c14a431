//! Lexer, parser and printer for workspace files.
//!
//! ```text
//! term     := 'S' | 'K' | IDENT | '(' term term ')' | '\' IDENT '.' term
//! let      := 'let' IDENT '=' term ';'
//! assembly := 'assembly' IDENT '{' ('element' IDENT '|-' '[' terms ']' ';')+ '}'
//! per      := 'per' IDENT '{' ('class' '[' terms ']' ';')* '}'
//! map      := 'map' IDENT ':' IDENT '->' IDENT '{' (IDENT '=>' IDENT ';')* 'tracker' term ';' '}'
//! ```
//!
//! Comments run from `#` to the end of the line. Lambdas are compiled away by
//! bracket abstraction while parsing.

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::asm::{mk_assembly, Assembly};
use crate::combinators::{abstract_var, derived, predecessor, prim_rec_combinator, successor, zero_test, Derived};
use crate::per::{mk_per, Per};
use crate::reduce::Fuel;
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: expected {expected}, found {found}")]
    Syntax { pos: Pos, expected: String, found: String },
    #[error("{pos}: unbound name `{name}`")]
    UnboundName { pos: Pos, name: String },
    #[error("{pos}: duplicate name `{name}`")]
    DuplicateName { pos: Pos, name: String },
    #[error("{pos}: {source}")]
    Invalid {
        pos: Pos,
        #[source]
        source: crate::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Backslash,
    Dot,
    Semi,
    Comma,
    Colon,
    Eq,
    Arrow,
    FatArrow,
    Turnstile,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "`{x}`"),
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Backslash => "`\\`",
            Tok::Dot => "`.`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Eq => "`=`",
            Tok::Arrow => "`->`",
            Tok::FatArrow => "`=>`",
            Tok::Turnstile => "`|-`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        if is_ident_start(c) {
            let mut name = String::new();
            while chars.peek().is_some_and(|&c| is_ident_char(c)) {
                name.push(bump(&mut chars).expect("peeked"));
            }
            out.push((Tok::Ident(name), pos));
            continue;
        }
        bump(&mut chars);
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '\\' => Tok::Backslash,
            '.' => Tok::Dot,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '-' if chars.peek() == Some(&'>') => {
                bump(&mut chars);
                Tok::Arrow
            }
            '=' if chars.peek() == Some(&'>') => {
                bump(&mut chars);
                Tok::FatArrow
            }
            '=' => Tok::Eq,
            '|' if chars.peek() == Some(&'-') => {
                bump(&mut chars);
                Tok::Turnstile
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    expected: "a token".into(),
                    found: format!("`{other}`"),
                })
            }
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Names usable in terms without a `let`.
pub fn prelude(name: &str) -> Option<Term> {
    if let Ok(d) = name.parse::<Derived>() {
        return Some(derived(d));
    }
    match name {
        "primRec" => Some(prim_rec_combinator()),
        "isZero" => Some(zero_test()),
        "pred" => Some(predecessor()),
        "succ" => Some(successor()),
        _ => None,
    }
}

/// How identifiers that are neither lambda-bound nor defined are treated.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Free {
    Variable,
    Error,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    defs: IndexMap<String, Term>,
    free: Free,
}

impl Parser {
    fn new(text: &str, defs: IndexMap<String, Term>, free: Free) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(text)?, at: 0, defs, free })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), expected: expected.into(), found: self.peek().to_string() })
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            self.error(tok.to_string())
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek() {
            Tok::Ident(x) if x != "S" && x != "K" => {
                let x = x.clone();
                Ok((x, self.next().1))
            }
            _ => self.error("an identifier"),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(x) if x == kw => {
                self.next();
                Ok(())
            }
            _ => self.error(format!("`{kw}`")),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    fn term(&mut self, bound: &mut Vec<String>) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) if x == "S" => {
                self.next();
                Ok(Term::s())
            }
            Tok::Ident(x) if x == "K" => {
                self.next();
                Ok(Term::k())
            }
            Tok::Ident(x) => {
                let pos = self.next().1;
                if bound.contains(&x) {
                    Ok(Term::var(&x))
                } else if let Some(t) = self.defs.get(&x) {
                    Ok(t.clone())
                } else if let Some(t) = prelude(&x) {
                    Ok(t)
                } else if self.free == Free::Variable {
                    Ok(Term::var(&x))
                } else {
                    Err(ParseError::UnboundName { pos, name: x })
                }
            }
            Tok::LParen => {
                self.next();
                let f = self.term(bound)?;
                let a = self.term(bound)?;
                self.expect(Tok::RParen)?;
                Ok(Term::app(f, a))
            }
            Tok::Backslash => {
                self.next();
                let (x, _) = self.ident()?;
                self.expect(Tok::Dot)?;
                bound.push(x.clone());
                let body = self.term(bound);
                bound.pop();
                Ok(abstract_var(&x, &body?))
            }
            _ => self.error("a term"),
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RBracket {
            out.push(self.term(&mut Vec::new())?);
            while *self.peek() == Tok::Comma {
                self.next();
                out.push(self.term(&mut Vec::new())?);
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(out)
    }
}

/// Parse a single term. Identifiers that are not lambda-bound resolve to
/// prelude combinators when they name one, and are variables otherwise.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_term_in(text, &IndexMap::new())
}

/// Parse a term against `let` definitions; other free identifiers become variables.
pub fn parse_term_in(text: &str, defs: &IndexMap<String, Term>) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, defs.clone(), Free::Variable)?;
    let t = p.term(&mut Vec::new())?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

/// Parse a term in pure core syntax: every identifier is a variable.
pub fn parse_core_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, IndexMap::new(), Free::Variable)?;
    let t = core_term(&mut p)?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

fn core_term(p: &mut Parser) -> Result<Term, ParseError> {
    match p.peek().clone() {
        Tok::Ident(x) => {
            p.next();
            Ok(match x.as_str() {
                "S" => Term::s(),
                "K" => Term::k(),
                _ => Term::var(&x),
            })
        }
        Tok::LParen => {
            p.next();
            let f = core_term(p)?;
            let a = core_term(p)?;
            p.expect(Tok::RParen)?;
            Ok(Term::app(f, a))
        }
        _ => p.error("a term"),
    }
}

/// A PER as declared; disjointness is checked when a command runs, at the
/// command's fuel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerDecl {
    pub name: String,
    pub blocks: Vec<Vec<Term>>,
}

impl PerDecl {
    pub fn validate(&self, fuel: Fuel) -> crate::Result<Per> {
        mk_per(self.name.clone(), self.blocks.clone(), fuel)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub mapping: Vec<(String, String)>,
    pub tracker: Term,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphismKind {
    Assembly,
    Per,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workspace {
    pub definitions: IndexMap<String, Term>,
    pub assemblies: IndexMap<String, Assembly>,
    pub pers: IndexMap<String, PerDecl>,
    pub maps: IndexMap<String, MorphismDecl>,
}

impl Workspace {
    pub fn morphism_kind(&self, decl: &MorphismDecl) -> MorphismKind {
        if self.assemblies.contains_key(&decl.source) {
            MorphismKind::Assembly
        } else {
            MorphismKind::Per
        }
    }
}

pub fn parse_workspace(text: &str) -> Result<Workspace, ParseError> {
    let mut ws = Workspace::default();
    let mut p = Parser::new(text, IndexMap::new(), Free::Error)?;
    while item(&mut p, &mut ws)? {}
    ws.definitions = p.defs;
    Ok(ws)
}

fn duplicate<V>(map: &IndexMap<String, V>, name: &str, pos: Pos) -> Result<(), ParseError> {
    if map.contains_key(name) {
        Err(ParseError::DuplicateName { pos, name: name.to_string() })
    } else {
        Ok(())
    }
}

/// Parse one top-level item; `false` at end of input.
fn item(p: &mut Parser, ws: &mut Workspace) -> Result<bool, ParseError> {
    let start = p.pos();
    match p.peek().clone() {
        Tok::Eof => Ok(false),
        Tok::Ident(kw) if kw == "let" => {
            p.next();
            let (name, pos) = p.ident()?;
            duplicate(&p.defs, &name, pos)?;
            p.expect(Tok::Eq)?;
            let t = p.term(&mut Vec::new())?;
            p.expect(Tok::Semi)?;
            p.defs.insert(name, t);
            Ok(true)
        }
        Tok::Ident(kw) if kw == "assembly" => {
            p.next();
            let (name, pos) = p.ident()?;
            duplicate(&ws.assemblies, &name, pos)?;
            p.expect(Tok::LBrace)?;
            let mut elements = Vec::new();
            loop {
                p.keyword("element")?;
                let (x, _) = p.ident()?;
                p.expect(Tok::Turnstile)?;
                let rs = p.term_list()?;
                p.expect(Tok::Semi)?;
                elements.push((x, rs));
                if *p.peek() == Tok::RBrace {
                    break;
                }
            }
            p.expect(Tok::RBrace)?;
            let a = mk_assembly(name.clone(), elements).map_err(|source| ParseError::Invalid { pos: start, source })?;
            ws.assemblies.insert(name, a);
            Ok(true)
        }
        Tok::Ident(kw) if kw == "per" => {
            p.next();
            let (name, pos) = p.ident()?;
            duplicate(&ws.pers, &name, pos)?;
            p.expect(Tok::LBrace)?;
            let mut blocks = Vec::new();
            while p.at_keyword("class") {
                p.next();
                let block = p.term_list()?;
                if block.is_empty() {
                    return Err(ParseError::Invalid { pos: start, source: crate::Error::EmptyBlock(blocks.len()) });
                }
                blocks.push(block);
                p.expect(Tok::Semi)?;
            }
            p.expect(Tok::RBrace)?;
            ws.pers.insert(name.clone(), PerDecl { name, blocks });
            Ok(true)
        }
        Tok::Ident(kw) if kw == "map" => {
            p.next();
            let (name, pos) = p.ident()?;
            duplicate(&ws.maps, &name, pos)?;
            p.expect(Tok::Colon)?;
            let (source, spos) = p.ident()?;
            p.expect(Tok::Arrow)?;
            let (target, tpos) = p.ident()?;
            let is_asm = |x: &str| ws.assemblies.contains_key(x);
            let is_per = |x: &str| ws.pers.contains_key(x);
            for (x, at) in [(&source, spos), (&target, tpos)] {
                if !is_asm(x) && !is_per(x) {
                    return Err(ParseError::UnboundName { pos: at, name: x.clone() });
                }
            }
            if is_asm(&source) != is_asm(&target) {
                return Err(ParseError::Invalid {
                    pos: start,
                    source: crate::Error::SignatureMismatch(format!("{source} and {target} are of different kinds")),
                });
            }
            p.expect(Tok::LBrace)?;
            let mut mapping = Vec::new();
            // PER morphisms are determined by their tracker alone
            while is_asm(&source) && !p.at_keyword("tracker") {
                let (x, _) = p.ident()?;
                p.expect(Tok::FatArrow)?;
                let (y, _) = p.ident()?;
                p.expect(Tok::Semi)?;
                mapping.push((x, y));
            }
            p.keyword("tracker")?;
            let tracker = p.term(&mut Vec::new())?;
            p.expect(Tok::Semi)?;
            p.expect(Tok::RBrace)?;
            ws.maps.insert(name.clone(), MorphismDecl { name, source, target, mapping, tracker });
            Ok(true)
        }
        _ => p.error("`let`, `assembly`, `per` or `map`"),
    }
}

fn term_list(ts: &[Term]) -> String {
    ts.iter().map(Term::to_string).collect::<Vec<_>>().join(", ")
}

/// Canonical text of a workspace; parsing it yields an equal workspace.
impl fmt::Display for Workspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, t) in &self.definitions {
            writeln!(f, "let {name} = {t};")?;
        }
        for (name, a) in &self.assemblies {
            writeln!(f, "assembly {name} {{")?;
            for (x, rs) in a.iter() {
                writeln!(f, "  element {x} |- [{}];", term_list(rs))?;
            }
            writeln!(f, "}}")?;
        }
        for (name, r) in &self.pers {
            writeln!(f, "per {name} {{")?;
            for block in &r.blocks {
                writeln!(f, "  class [{}];", term_list(block))?;
            }
            writeln!(f, "}}")?;
        }
        for (name, m) in &self.maps {
            writeln!(f, "map {name} : {} -> {} {{", m.source, m.target)?;
            for (x, y) in &m.mapping {
                writeln!(f, "  {x} => {y};")?;
            }
            writeln!(f, "  tracker {};", m.tracker)?;
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}
