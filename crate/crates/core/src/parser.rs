//! Reading programs and queries written in a small Prolog subset, and
//! rendering atoms and answers back to text.
//!
//! Accepted syntax: `head.` and `head :- b1, ..., bn.` clauses, lowercase
//! functors and predicates, variables starting with an uppercase letter or
//! `_`, compound terms `f(t1, ..., tn)`, integers (read as constants) and `%`
//! line comments. Each `_` is a distinct variable.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::terms::{Atom, Program, Substitution, Symbol, Syntax, Term, Var, ANON_PREFIX};

/// Predicates that user programs can neither define nor call.
const RESERVED: &[(&str, usize)] = &[("true", 0), ("fail", 0), ("ret", 1)];

/// The tracing switch: callable, never definable.
pub const RTRACE: &str = "rtrace";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{origin}:{line}:{column}: {message}")]
pub struct ParseError {
    pub origin: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Program text together with where it came from (a path or `<inline>`).
#[derive(Debug, Clone)]
pub struct SourceProgram {
    pub text: String,
    pub origin: String,
}

impl SourceProgram {
    pub fn inline(text: impl Into<String>) -> Self {
        SourceProgram {
            text: text.into(),
            origin: "<inline>".to_owned(),
        }
    }

    /// Program text whose diagnostics are reported against `origin`.
    pub fn named(text: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceProgram {
            text: text.into(),
            origin: origin.into(),
        }
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> std::io::Result<Self> {
        let path = path.as_ref();
        Ok(SourceProgram {
            text: std::fs::read_to_string(path)?,
            origin: path.display().to_string(),
        })
    }
}

/// A non-empty conjunction of atoms, plus the names the user wrote in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub atoms: Vec<Atom>,
    /// Named (non-anonymous) variables in first-occurrence order.
    pub originals: Vec<Var>,
}

impl Query {
    pub fn new(atoms: Vec<Atom>) -> Self {
        let originals = atoms
            .vars()
            .into_iter()
            .filter(|v| !v.is_anonymous())
            .collect();
        Query { atoms, originals }
    }

    /// Every variable of the query, anonymous ones included.
    pub fn vars(&self) -> Vec<Var> {
        self.atoms.vars()
    }
}

impl Syntax for Query {
    fn apply(&self, subst: &Substitution) -> Self {
        Query {
            atoms: self.atoms.apply(subst),
            originals: self.originals.clone(),
        }
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Var) -> Self {
        Query {
            atoms: self.atoms.map_vars(f),
            originals: self.originals.iter().map(|v| f(v)).collect(),
        }
    }

    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        self.atoms.visit_vars(f)
    }

    fn match_variant(&self, other: &Self, bij: &mut crate::terms::Bijection) -> bool {
        self.atoms.match_variant(&other.atoms, bij)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

pub fn parse_program(src: &SourceProgram) -> Result<Program, ParseError> {
    let mut parser = Parser::new(&src.text, &src.origin)?;
    let mut clauses = Vec::new();
    while !parser.at_end() {
        parser.scope.clear();
        let head = parser.atom()?;
        check_head(&parser, &head)?;
        let body = if parser.eat(&Tok::Neck)? {
            parser.body()?
        } else {
            Vec::new()
        };
        parser.expect(&Tok::Dot, "`.` at end of clause")?;
        clauses.push((head, body));
    }
    Ok(Program::new(clauses))
}

/// Shorthand for [`parse_program`] on inline text.
pub fn parse_program_str(text: &str) -> Result<Program, ParseError> {
    parse_program(&SourceProgram::inline(text))
}

/// Parses a query; a trailing `.` is optional.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut parser = Parser::new(text, "<query>")?;
    if parser.at_end() {
        return Err(parser.error_here("empty query"));
    }
    let atoms = parser.body()?;
    parser.eat(&Tok::Dot)?;
    if !parser.at_end() {
        return Err(parser.error_here("unexpected input after query"));
    }
    Ok(Query::new(atoms))
}

fn check_head(parser: &Parser<'_>, head: &Atom) -> Result<(), ParseError> {
    if is_reserved(head) || head.is(RTRACE, 0) {
        return Err(parser.error_at(
            parser.last_start,
            format!("cannot define reserved predicate {}/{}", head.pred, head.arity()),
        ));
    }
    Ok(())
}

fn is_reserved(atom: &Atom) -> bool {
    RESERVED.iter().any(|&(name, arity)| atom.is(name, arity))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Var(String),
    Int(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) | Tok::Var(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Neck => f.write_str("`:-`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    /// Next token and where it starts, or an error message with its position.
    fn next(&mut self) -> Result<(Tok, Pos), (String, Pos)> {
        self.skip_trivia();
        let start = self.pos;
        let Some(c) = self.bump() else {
            return Ok((Tok::End, start));
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => {
                if self.chars.peek() == Some(&'-') {
                    self.bump();
                    Tok::Neck
                } else {
                    return Err(("expected `:-`".to_owned(), start));
                }
            }
            c if c.is_ascii_digit() => Tok::Int(self.word(c, |c| c.is_ascii_digit())),
            c if c.is_lowercase() => Tok::Name(self.word(c, is_ident_char)),
            c if c.is_uppercase() || c == '_' => Tok::Var(self.word(c, is_ident_char)),
            other => return Err((format!("unexpected character {other:?}"), start)),
        };
        Ok((tok, start))
    }

    fn word(&mut self, first: char, more: fn(char) -> bool) -> String {
        let mut s = String::from(first);
        while let Some(&c) = self.chars.peek() {
            if !more(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    origin: &'a str,
    tok: Tok,
    start: Pos,
    last_start: Pos,
    scope: HashMap<String, Var>,
    anon: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, origin: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
        };
        let (tok, start) = lexer.next().map_err(|(m, p)| error(origin, p, m))?;
        Ok(Parser {
            lexer,
            origin,
            tok,
            start,
            last_start: start,
            scope: HashMap::new(),
            anon: 0,
        })
    }

    fn at_end(&self) -> bool {
        self.tok == Tok::End
    }

    fn advance(&mut self) -> Result<Tok, ParseError> {
        let (next, start) = self
            .lexer
            .next()
            .map_err(|(m, p)| error(self.origin, p, m))?;
        self.last_start = self.start;
        self.start = start;
        Ok(std::mem::replace(&mut self.tok, next))
    }

    fn eat(&mut self, tok: &Tok) -> Result<bool, ParseError> {
        if &self.tok == tok {
            self.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok)? {
            Ok(())
        } else {
            Err(self.error_here(format!("expected {what}, found {}", self.tok)))
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.start, message)
    }

    fn error_at(&self, pos: Pos, message: impl Into<String>) -> ParseError {
        error(self.origin, pos, message.into())
    }

    fn body(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut atoms = Vec::new();
        loop {
            let atom = self.atom()?;
            if is_reserved(&atom) {
                return Err(self.error_at(
                    self.last_start,
                    format!("reserved predicate {}/{} cannot be called", atom.pred, atom.arity()),
                ));
            }
            atoms.push(atom);
            if !self.eat(&Tok::Comma)? {
                return Ok(atoms);
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.start;
        match self.advance()? {
            Tok::Name(name) => {
                let args = self.args()?;
                self.last_start = start;
                Ok(Atom {
                    pred: Symbol::new(&name),
                    args,
                })
            }
            other => Err(self.error_at(start, format!("expected a predicate name, found {other}"))),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if !self.eat(&Tok::LParen)? {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(&Tok::RParen)? {
                return Ok(args);
            }
            self.expect(&Tok::Comma, "`,` or `)`")?;
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.start;
        match self.advance()? {
            Tok::Var(name) if name == "_" => {
                self.anon += 1;
                Ok(Term::Var(Var::user(&format!("{ANON_PREFIX}{}", self.anon))))
            }
            Tok::Var(name) => {
                let var = self
                    .scope
                    .entry(name.clone())
                    .or_insert_with(|| Var::user(&name))
                    .clone();
                Ok(Term::Var(var))
            }
            Tok::Int(digits) => Ok(Term::constant(&digits)),
            Tok::Name(name) => Ok(Term::App(Symbol::new(&name), self.args()?)),
            other => Err(self.error_at(start, format!("expected a term, found {other}"))),
        }
    }
}

fn error(origin: &str, pos: Pos, message: String) -> ParseError {
    ParseError {
        origin: origin.to_owned(),
        line: pos.line,
        column: pos.column,
        message,
    }
}

/// Display names for variables. User variables print by name; engine
/// renamings print as `_G<k>`, where `k` is assigned on first sight and never
/// changes for the lifetime of the table.
#[derive(Debug, Default, Clone)]
pub struct VarNames {
    generated: HashMap<Var, usize>,
}

impl VarNames {
    pub fn new() -> Self {
        VarNames::default()
    }

    pub fn var(&mut self, v: &Var) -> String {
        if v.is_generated() {
            let next = self.generated.len() + 1;
            let k = *self.generated.entry(v.clone()).or_insert(next);
            format!("_G{k}")
        } else if v.is_anonymous() {
            // anonymous user variables print as Prolog would show a fresh one
            format!("_{}", &v.name().as_str()[ANON_PREFIX.len()..])
        } else {
            v.name().to_string()
        }
    }

    pub fn term(&mut self, t: &Term) -> String {
        let mut out = String::new();
        self.write_term(t, &mut out);
        out
    }

    pub fn atom(&mut self, a: &Atom) -> String {
        let mut out = a.pred.to_string();
        self.write_args(&a.args, &mut out);
        out
    }

    fn write_term(&mut self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(&self.var(v)),
            Term::App(f, args) => {
                out.push_str(f.as_str());
                self.write_args(args, out);
            }
        }
    }

    fn write_args(&mut self, args: &[Term], out: &mut String) {
        if args.is_empty() {
            return;
        }
        out.push('(');
        for (i, arg) in args.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.write_term(arg, out);
        }
        out.push(')');
    }
}

pub fn format_atom(atom: &Atom, names: &mut VarNames) -> String {
    names.atom(atom)
}

/// The bindings of `theta` for the query's named variables, in the order the
/// user wrote them; unbound variables are left out.
pub fn answer_bindings(theta: &Substitution, query: &Query, names: &mut VarNames) -> Vec<(String, String)> {
    query
        .originals
        .iter()
        .filter_map(|v| theta.get(v).map(|t| (names.var(v), names.term(t))))
        .collect()
}

/// Equational form `A = b, B = c`, or `true` when nothing is bound.
pub fn format_answer(theta: &Substitution, query: &Query, names: &mut VarNames) -> String {
    let bindings = answer_bindings(theta, query, names);
    if bindings.is_empty() {
        return "true".to_owned();
    }
    bindings
        .iter()
        .map(|(v, t)| format!("{v} = {t}"))
        .collect::<Vec<_>>()
        .join(", ")
}
