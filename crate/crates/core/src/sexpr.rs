//! S-expression reader and the term grammar
//!
//! ```text
//! t ::= (var N) | (const DECIMAL) | (add t t) | (mul t t) | (neg t)
//!     | (exp t) | (sin t) | (cos t) | (atan t) | (tanh t) | (recip1psq t)
//! ```
//!
//! `DECIMAL` may carry a sign and an exponent; ratios `P/Q` are accepted
//! for constants that have no finite decimal expansion.

use std::fmt;

use thiserror::Error;

use crate::constant::Constant;
use crate::term::{Primitive, SmoothTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Atom { text: String, pos: Pos },
    List { items: Vec<Sexp>, pos: Pos },
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom { pos, .. } | Sexp::List { pos, .. } => *pos,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            Sexp::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Some(items),
            Sexp::Atom { .. } => None,
        }
    }

    /// Head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|items| items.first()).and_then(Sexp::as_atom)
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom { text, .. } => f.write_str(text),
            Sexp::List { items, .. } => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: expected {}, found {found}", expected.join(" | "))]
    Syntax { line: usize, column: usize, expected: Vec<String>, found: String },

    #[error("arity error at {line}:{column}: `{head}` takes {expected} argument(s), got {found}")]
    Arity { line: usize, column: usize, head: String, expected: usize, found: usize },
}

impl ParseError {
    pub fn syntax(pos: Pos, expected: &[&str], found: impl Into<String>) -> Self {
        ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.into(),
        }
    }

    pub fn arity(pos: Pos, head: &str, expected: usize, found: usize) -> Self {
        ParseError::Arity { line: pos.line, column: pos.column, head: head.to_string(), expected, found }
    }
}

/// Reads every top-level expression in `src`. `;` starts a line comment.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut reader = Reader { chars: src.chars().collect(), i: 0, line: 1, column: 1 };
    let mut out = Vec::new();
    loop {
        reader.skip_ws();
        if reader.peek().is_none() {
            return Ok(out);
        }
        out.push(reader.read()?);
    }
}

/// Reads exactly one expression.
pub fn read_one(src: &str) -> Result<Sexp, ParseError> {
    let mut all = read_all(src)?;
    match all.len() {
        1 => Ok(all.pop().expect("one")),
        0 => Err(ParseError::syntax(Pos { line: 1, column: 1 }, &["expression"], "end of input")),
        _ => Err(ParseError::syntax(all[1].pos(), &["end of input"], all[1].to_string())),
    }
}

struct Reader {
    chars: Vec<char>,
    i: usize,
    line: usize,
    column: usize,
}

impl Reader {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, column: self.column }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_ws();
        let pos = self.pos();
        match self.peek() {
            None => Err(ParseError::syntax(pos, &["expression"], "end of input")),
            Some(')') => Err(ParseError::syntax(pos, &["expression"], ")")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(ParseError::syntax(self.pos(), &[")"], "end of input")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List { items, pos });
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom { text, pos })
            }
        }
    }
}

pub const TERM_HEADS: [&str; 11] =
    ["var", "const", "add", "mul", "neg", "exp", "sin", "cos", "atan", "tanh", "recip1psq"];

pub fn expect_args<'a>(sexp: &'a Sexp, head: &str, n: usize) -> Result<&'a [Sexp], ParseError> {
    let items = sexp.as_list().expect("list");
    if items.len() - 1 != n {
        return Err(ParseError::arity(sexp.pos(), head, n, items.len() - 1));
    }
    Ok(&items[1..])
}

pub fn parse_usize(sexp: &Sexp) -> Result<usize, ParseError> {
    sexp.as_atom()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| ParseError::syntax(sexp.pos(), &["non-negative integer"], sexp.to_string()))
}

pub fn parse_constant(sexp: &Sexp) -> Result<Constant, ParseError> {
    sexp.as_atom()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| ParseError::syntax(sexp.pos(), &["DECIMAL"], sexp.to_string()))
}

pub fn parse_term(sexp: &Sexp) -> Result<SmoothTerm, ParseError> {
    let Some(head) = sexp.head() else {
        return Err(ParseError::syntax(sexp.pos(), &["term"], sexp.to_string()));
    };
    match head {
        "var" => Ok(SmoothTerm::Var(parse_usize(&expect_args(sexp, head, 1)?[0])?)),
        "const" => Ok(SmoothTerm::Const(parse_constant(&expect_args(sexp, head, 1)?[0])?)),
        "add" | "mul" => {
            let args = expect_args(sexp, head, 2)?;
            let (a, b) = (parse_term(&args[0])?, parse_term(&args[1])?);
            Ok(if head == "add" { a + b } else { a * b })
        }
        "neg" => Ok(-parse_term(&expect_args(sexp, head, 1)?[0])?),
        _ => match Primitive::from_name(head) {
            Some(p) => Ok(SmoothTerm::prim(p, parse_term(&expect_args(sexp, head, p.arity())?[0])?)),
            None => Err(ParseError::syntax(sexp.pos(), &TERM_HEADS, head)),
        },
    }
}

pub fn parse_term_str(src: &str) -> Result<SmoothTerm, ParseError> {
    parse_term(&read_one(src)?)
}
