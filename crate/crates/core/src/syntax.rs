//! Finite CCS terms: names, labels, the process AST, a parser and a canonical printer.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A channel name matching `[a-z][a-z0-9_]*`, other than the reserved word `tau`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(String);

impl Name {
    pub fn new(text: &str) -> Result<Name, ParseError> {
        let mut chars = text.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
            && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if !ok || text == "tau" {
            return Err(ParseError::new(0, format!("invalid name `{text}`")));
        }
        Ok(Name(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    In(Name),
    Out(Name),
    Tau,
}

impl Label {
    pub fn input(name: &str) -> Label {
        Label::In(Name::new(name).expect("valid name"))
    }

    pub fn output(name: &str) -> Label {
        Label::Out(Name::new(name).expect("valid name"))
    }

    /// `None` for tau, which has no complement.
    pub fn complement(&self) -> Option<Label> {
        match self {
            Label::In(a) => Some(Label::Out(a.clone())),
            Label::Out(a) => Some(Label::In(a.clone())),
            Label::Tau => None,
        }
    }

    pub fn name(&self) -> Option<&Name> {
        match self {
            Label::In(a) | Label::Out(a) => Some(a),
            Label::Tau => None,
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    pub fn complements(&self, other: &Label) -> bool {
        self.complement().as_ref() == Some(other)
    }

    /// Parses `a`, `'a` or `tau`.
    pub fn parse(text: &str) -> Result<Label, ParseError> {
        let text = text.trim();
        if text == "tau" {
            return Ok(Label::Tau);
        }
        match text.strip_prefix('\'') {
            Some(rest) => Ok(Label::Out(Name::new(rest)?)),
            None => Ok(Label::In(Name::new(text)?)),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::In(a) => write!(f, "{a}"),
            Label::Out(a) => write!(f, "'{a}"),
            Label::Tau => f.write_str("tau"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    Nil,
    Prefix(Label, Box<Process>),
    Par(Box<Process>, Box<Process>),
    Sum(Box<Process>, Box<Process>),
    Restrict(Box<Process>, BTreeSet<Name>),
}

impl Process {
    pub fn prefix(label: Label, p: Process) -> Process {
        Process::Prefix(label, Box::new(p))
    }

    pub fn par(p: Process, q: Process) -> Process {
        Process::Par(Box::new(p), Box::new(q))
    }

    pub fn sum(p: Process, q: Process) -> Process {
        Process::Sum(Box::new(p), Box::new(q))
    }

    pub fn restrict(p: Process, names: impl IntoIterator<Item = Name>) -> Process {
        Process::Restrict(Box::new(p), names.into_iter().collect())
    }

    /// True when every sum has two prefixed operands.
    pub fn is_guarded(&self) -> bool {
        match self {
            Process::Nil => true,
            Process::Prefix(_, p) | Process::Restrict(p, _) => p.is_guarded(),
            Process::Par(p, q) => p.is_guarded() && q.is_guarded(),
            Process::Sum(p, q) => {
                matches!(**p, Process::Prefix(..))
                    && matches!(**q, Process::Prefix(..))
                    && p.is_guarded()
                    && q.is_guarded()
            }
        }
    }

    /// Number of prefixes occurring in the term.
    pub fn action_count(&self) -> usize {
        match self {
            Process::Nil => 0,
            Process::Prefix(_, p) => 1 + p.action_count(),
            Process::Restrict(p, _) => p.action_count(),
            Process::Par(p, q) | Process::Sum(p, q) => p.action_count() + q.action_count(),
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    fn new(pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

/// Which sums the parser accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SumMode {
    /// Exactly two prefixed operands.
    #[default]
    Guarded,
    /// Any operands, left-associative chains allowed.
    General,
}

/// Parses a guarded-sum CCS term.
pub fn parse(text: &str) -> Result<Process, ParseError> {
    parse_with(text, SumMode::Guarded)
}

pub fn parse_with(text: &str, mode: SumMode) -> Result<Process, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        at: 0,
        mode,
        end: text.len(),
    };
    let p = parser.par()?;
    if let Some((pos, tok)) = parser.tokens.get(parser.at) {
        return Err(ParseError::new(*pos, format!("unexpected {tok}")));
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Zero,
    Ident(String),
    Quote,
    Dot,
    Bar,
    Plus,
    LParen,
    RParen,
    Backslash,
    LBrace,
    RBrace,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Zero => f.write_str("`0`"),
            Tok::Ident(s) => write!(f, "name `{s}`"),
            Tok::Quote => f.write_str("`'`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let single = match c {
            '0' => Some(Tok::Zero),
            '\'' => Some(Tok::Quote),
            '.' => Some(Tok::Dot),
            '|' => Some(Tok::Bar),
            '+' => Some(Tok::Plus),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '\\' => Some(Tok::Backslash),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((i, tok));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_lowercase() {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_')
            {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError::new(i, format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    at: usize,
    mode: SumMode,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {tok}")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::new(self.pos(), format!("{wanted}, found {t}")),
            None => ParseError::new(self.pos(), format!("{wanted}, found end of input")),
        }
    }

    fn par(&mut self) -> Result<Process, ParseError> {
        let mut p = self.sum()?;
        while self.eat(&Tok::Bar) {
            let q = self.sum()?;
            p = Process::par(p, q);
        }
        Ok(p)
    }

    fn sum(&mut self) -> Result<Process, ParseError> {
        let start = self.pos();
        let mut p = self.postfix()?;
        if self.peek() != Some(&Tok::Plus) {
            return Ok(p);
        }
        match self.mode {
            SumMode::Guarded => {
                if !matches!(p, Process::Prefix(..)) {
                    return Err(ParseError::new(start, "sum operand must be a prefixed process"));
                }
                self.at += 1;
                let right_start = self.pos();
                let q = self.postfix()?;
                if !matches!(q, Process::Prefix(..)) {
                    return Err(ParseError::new(
                        right_start,
                        "sum operand must be a prefixed process",
                    ));
                }
                if self.peek() == Some(&Tok::Plus) {
                    return Err(ParseError::new(
                        self.pos(),
                        "sums are binary; parenthesize or use general sums",
                    ));
                }
                Ok(Process::sum(p, q))
            }
            SumMode::General => {
                while self.eat(&Tok::Plus) {
                    let q = self.postfix()?;
                    p = Process::sum(p, q);
                }
                Ok(p)
            }
        }
    }

    fn postfix(&mut self) -> Result<Process, ParseError> {
        let mut p = self.atom()?;
        while self.eat(&Tok::Backslash) {
            self.expect(Tok::LBrace)?;
            let mut names = BTreeSet::new();
            loop {
                names.insert(self.name()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RBrace)?;
            p = Process::Restrict(Box::new(p), names);
        }
        Ok(p)
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.at += 1;
                Name::new(&s).map_err(|e| ParseError::new(pos, e.message))
            }
            _ => Err(self.unexpected("expected a name")),
        }
    }

    fn atom(&mut self) -> Result<Process, ParseError> {
        match self.peek() {
            Some(Tok::Zero) => {
                self.at += 1;
                Ok(Process::Nil)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let p = self.par()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Some(Tok::Quote) | Some(Tok::Ident(_)) => {
                let output = self.eat(&Tok::Quote);
                let pos = self.pos();
                let name = self.name().map_err(|e| {
                    if e.message.contains("`tau`") {
                        ParseError::new(pos, "tau cannot be used as a prefix")
                    } else {
                        e
                    }
                })?;
                let label = if output { Label::Out(name) } else { Label::In(name) };
                let cont = if self.eat(&Tok::Dot) {
                    self.atom()?
                } else {
                    Process::Nil
                };
                Ok(Process::prefix(label, cont))
            }
            _ => Err(self.unexpected("expected a process")),
        }
    }
}

/// Canonical text of a term; `parse` inverts it on guarded terms and
/// `parse_with(.., SumMode::General)` on all terms.
pub fn print(p: &Process) -> String {
    let mut out = String::new();
    print_par(p, &mut out);
    out
}

fn print_par(p: &Process, out: &mut String) {
    match p {
        Process::Par(l, r) => {
            print_par(l, out);
            out.push_str(" | ");
            print_sum(r, out);
        }
        _ => print_sum(p, out),
    }
}

fn print_sum(p: &Process, out: &mut String) {
    match p {
        Process::Sum(l, r) => {
            print_sum(l, out);
            out.push_str(" + ");
            print_postfix(r, out);
        }
        Process::Par(..) => paren(p, out),
        _ => print_postfix(p, out),
    }
}

fn print_postfix(p: &Process, out: &mut String) {
    match p {
        Process::Restrict(q, names) => {
            print_postfix(q, out);
            out.push_str("\\{");
            let names: Vec<&str> = names.iter().map(Name::as_str).collect();
            out.push_str(&names.join(","));
            out.push('}');
        }
        _ => print_atom(p, out),
    }
}

fn print_atom(p: &Process, out: &mut String) {
    match p {
        Process::Nil => out.push('0'),
        Process::Prefix(l, q) => {
            out.push_str(&l.to_string());
            out.push('.');
            print_atom(q, out);
        }
        _ => paren(p, out),
    }
}

fn paren(p: &Process, out: &mut String) {
    out.push('(');
    print_par(p, out);
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Label {
        Label::input(n)
    }

    #[test]
    fn parses_example_process() {
        let p = parse("a.b | c.'a").unwrap();
        let expected = Process::par(
            Process::prefix(a("a"), Process::prefix(a("b"), Process::Nil)),
            Process::prefix(a("c"), Process::prefix(Label::output("a"), Process::Nil)),
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn nil_and_restriction() {
        assert_eq!(parse("0").unwrap(), Process::Nil);
        let p = parse("(a.0 + b.0) \\ {a}").unwrap();
        let sum = Process::sum(
            Process::prefix(a("a"), Process::Nil),
            Process::prefix(a("b"), Process::Nil),
        );
        assert_eq!(p, Process::restrict(sum, [Name::new("a").unwrap()]));
    }

    #[test]
    fn prints_canonically() {
        assert_eq!(print(&Process::Nil), "0");
        let aa = Process::par(
            Process::prefix(a("a"), Process::Nil),
            Process::prefix(a("a"), Process::Nil),
        );
        assert_eq!(print(&aa), "a.0 | a.0");
        assert_eq!(print(&parse("a.(b|c)").unwrap()), "a.(b.0 | c.0)");
        assert_eq!(print(&parse("a | (b | c)").unwrap()), "a.0 | (b.0 | c.0)");
        assert_eq!(print(&parse("(a.b)\\{b,a}").unwrap()), "a.b.0\\{a,b}");
        assert_eq!(print(&parse("a.((b.c)\\{c})").unwrap()), "a.(b.c.0\\{c})");
    }

    #[test]
    fn precedence() {
        // `|` is loosest, then `+`, then `.`
        let p = parse("a.b + c | d").unwrap();
        match p {
            Process::Par(l, _) => assert!(matches!(*l, Process::Sum(..))),
            other => panic!("unexpected {other:?}"),
        }
        let r = parse("a.b\\{a}").unwrap();
        assert!(matches!(r, Process::Restrict(..)));
    }

    #[test]
    fn rejects_tau_and_unguarded_sums() {
        let err = parse("tau.a").unwrap_err();
        assert!(err.message.contains("tau"), "{err}");
        assert!(parse("a + b + c").is_err());
        assert!(parse("(a|b) + c").is_err());
        assert!(parse("a + 0").is_err());
        assert!(parse("a.").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("a | #").unwrap_err();
        assert_eq!(err.pos, 4);
        let err = parse("a + b + c").unwrap_err();
        assert_eq!(err.pos, 6);
        let err = parse("(a").unwrap_err();
        assert_eq!(err.pos, 2);
    }

    #[test]
    fn general_sums() {
        let p = parse_with("(a|(b+c)) + (a|b) + ((a+c)|b)", SumMode::General).unwrap();
        assert!(!p.is_guarded());
        assert_eq!(parse_with(&print(&p), SumMode::General).unwrap(), p);
        assert_eq!(print(&p), "(a.0 | b.0 + c.0) + (a.0 | b.0) + (a.0 + c.0 | b.0)");
    }

    #[test]
    fn label_helpers() {
        assert_eq!(Label::parse("'a").unwrap(), Label::output("a"));
        assert_eq!(Label::parse("tau").unwrap(), Label::Tau);
        assert!(a("a").complements(&Label::output("a")));
        assert_eq!(Label::Tau.complement(), None);
        assert!(Name::new("tau").is_err());
        assert!(Name::new("1a").is_err());
    }
}
