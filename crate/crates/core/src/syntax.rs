//! Haskell-style surface syntax for both calculi.
//!
//! Printing is canonical: single spaces between tokens, lambdas as
//! `\x0 -> e`, application left-associative with lambda and compound
//! arguments parenthesized. A cons chain ending in `[]` prints as a list
//! literal, any other cons prints prefix as `(:) h t`. The parser also
//! accepts infix `h : t` and redundant parentheses.

use std::fmt::{self, Write};

use thiserror::Error;

use crate::term::{self, Lang, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok {
    Backslash,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    ConsOp,
    UnitLit,
    NilLit,
    Ident(u32),
    Ite,
    Foldr,
    True,
    False,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Backslash => f.write_str("`\\`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::ConsOp => f.write_str("`(:)`"),
            Tok::UnitLit => f.write_str("`()`"),
            Tok::NilLit => f.write_str("`[]`"),
            Tok::Ident(i) => write!(f, "`x{i}`"),
            Tok::Ite => f.write_str("`ite`"),
            Tok::Foldr => f.write_str("`foldr`"),
            Tok::True => f.write_str("`True`"),
            Tok::False => f.write_str("`False`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset: usize, found: String| ParseError {
        offset,
        expected: vec!["a token"],
        found,
    };
    while i < bytes.len() {
        let rest = &src[i..];
        let start = i;
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'\\' => {
                i += 1;
                Tok::Backslash
            }
            b'-' if rest.starts_with("->") => {
                i += 2;
                Tok::Arrow
            }
            b'(' if rest.starts_with("(:)") => {
                i += 3;
                Tok::ConsOp
            }
            b'(' if rest.starts_with("()") => {
                i += 2;
                Tok::UnitLit
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'[' if rest.starts_with("[]") => {
                i += 2;
                Tok::NilLit
            }
            b'[' => {
                i += 1;
                Tok::LBracket
            }
            b']' => {
                i += 1;
                Tok::RBracket
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b':' => {
                i += 1;
                Tok::Colon
            }
            c if c.is_ascii_alphabetic() => {
                let len = rest
                    .bytes()
                    .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                    .count();
                let word = &rest[..len];
                i += len;
                match word {
                    "ite" => Tok::Ite,
                    "foldr" => Tok::Foldr,
                    "True" => Tok::True,
                    "False" => Tok::False,
                    _ => {
                        let digits = word.strip_prefix('x').filter(|d| {
                            !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())
                        });
                        match digits.and_then(|d| d.parse::<u32>().ok()) {
                            Some(n) => Tok::Ident(n),
                            None => return Err(err(start, format!("`{word}`"))),
                        }
                    }
                }
            }
            _ => {
                let ch = rest.chars().next().unwrap_or('?');
                return Err(err(start, format!("`{ch}`")));
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    lang: Lang,
}

impl Parser {
    fn peek(&self) -> Tok {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        let (tok, offset) = self.toks[self.pos];
        ParseError {
            offset,
            expected,
            found: tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![name]))
        }
    }

    fn atom_starts(&self) -> &'static [&'static str] {
        match self.lang {
            Lang::Lc1 => &["variable", "`(`"],
            Lang::Lc2 => &["variable", "`(`", "`()`", "`True`", "`False`", "`[]`", "`[`"],
        }
    }

    fn expr_starts(&self) -> Vec<&'static str> {
        let mut v = vec!["`\\`"];
        v.extend_from_slice(self.atom_starts());
        if self.lang == Lang::Lc2 {
            v.extend_from_slice(&["`ite`", "`foldr`", "`(:)`"]);
        }
        v
    }

    fn is_atom_start(&self, t: Tok) -> bool {
        match t {
            Tok::Ident(_) | Tok::LParen => true,
            Tok::UnitLit | Tok::True | Tok::False | Tok::NilLit | Tok::LBracket => {
                self.lang == Lang::Lc2
            }
            _ => false,
        }
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Tok::Backslash {
            self.bump();
            let x = match self.bump() {
                Tok::Ident(i) => Var(i),
                _ => {
                    self.pos -= 1;
                    return Err(self.error(vec!["variable"]));
                }
            };
            self.expect(Tok::Arrow, "`->`")?;
            let body = self.expr()?;
            return Ok(Term::Lam(x, None, Box::new(body)));
        }
        let head = self.application()?;
        if self.lang == Lang::Lc2 && self.peek() == Tok::Colon {
            self.bump();
            let tail = self.expr()?;
            return Ok(term::cons(head, tail));
        }
        Ok(head)
    }

    fn application(&mut self) -> Result<Term, ParseError> {
        let head = match (self.lang, self.peek()) {
            (Lang::Lc2, Tok::Ite) => {
                self.bump();
                let (c, a, b) = (self.atom()?, self.atom()?, self.atom()?);
                term::ite(c, a, b)
            }
            (Lang::Lc2, Tok::Foldr) => {
                self.bump();
                let (f, e, l) = (self.atom()?, self.atom()?, self.atom()?);
                term::foldr(f, e, l)
            }
            (Lang::Lc2, Tok::ConsOp) => {
                self.bump();
                let (h, t) = (self.atom()?, self.atom()?);
                term::cons(h, t)
            }
            (_, t) if self.is_atom_start(t) => self.atom()?,
            _ => return Err(self.error(self.expr_starts())),
        };
        let mut acc = head;
        while self.is_atom_start(self.peek()) {
            let arg = self.atom()?;
            acc = term::app(acc, arg);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let tok = self.peek();
        if !self.is_atom_start(tok) {
            return Err(self.error(self.atom_starts().to_vec()));
        }
        self.bump();
        Ok(match tok {
            Tok::Ident(i) => Term::Var(Var(i)),
            Tok::UnitLit => Term::Unit,
            Tok::True => Term::True,
            Tok::False => Term::False,
            Tok::NilLit => Term::Nil(None),
            Tok::LParen => {
                if self.lang == Lang::Lc2 && self.peek() == Tok::RParen {
                    self.bump();
                    return Ok(Term::Unit);
                }
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                inner
            }
            Tok::LBracket => {
                let mut elems = vec![self.expr()?];
                while self.peek() == Tok::Comma {
                    self.bump();
                    elems.push(self.expr()?);
                }
                if self.peek() != Tok::RBracket {
                    return Err(self.error(vec!["`,`", "`]`"]));
                }
                self.bump();
                elems
                    .into_iter()
                    .rev()
                    .fold(Term::Nil(None), |tail, h| term::cons(h, tail))
            }
            _ => unreachable!("checked by is_atom_start"),
        })
    }
}

pub fn parse(src: &str, lang: Lang) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        lang,
    };
    let t = p.expr()?;
    if p.peek() != Tok::Eof {
        let mut expected = vec!["end of input"];
        if lang == Lang::Lc2 {
            expected.push("`:`");
        }
        return Err(p.error(expected));
    }
    Ok(t)
}

/// Parses an untyped-calculus term; sugar is a syntax error.
pub fn parse1(src: &str) -> Result<Term, ParseError> {
    parse(src, Lang::Lc1)
}

/// Parses a sugared term. Binder and `[]` annotations come back as `None`.
pub fn parse2(src: &str) -> Result<Term, ParseError> {
    parse(src, Lang::Lc2)
}

/// Canonical surface string of a term of either calculus.
pub fn print(t: &Term) -> String {
    let mut out = String::new();
    write_top(&mut out, t);
    out
}

/// Prints an untyped-calculus term. Identical to [`print`] on pure terms.
pub fn print1(t: &Term) -> String {
    debug_assert!(t.is_pure(), "print1 on a sugared term");
    print(t)
}

pub fn print2(t: &Term) -> String {
    print(t)
}

/// Elements of a cons chain terminated by `Nil`, if it is one.
fn list_elems(t: &Term) -> Option<Vec<&Term>> {
    let mut elems = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Cons(h, tl) => {
                elems.push(&**h);
                cur = tl;
            }
            Term::Nil(_) => return Some(elems),
            _ => return None,
        }
    }
}

fn is_atomic(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Unit | Term::True | Term::False | Term::Nil(_) => true,
        Term::Cons(..) => list_elems(t).is_some(),
        _ => false,
    }
}

fn write_top(out: &mut String, t: &Term) {
    match t {
        Term::Lam(x, _, body) => {
            let _ = write!(out, "\\{x} -> ");
            write_top(out, body);
        }
        _ => write_spine(out, t),
    }
}

/// Writes an application-like form: a head followed by atomic arguments.
fn write_spine(out: &mut String, t: &Term) {
    match t {
        Term::App(f, a) => {
            match **f {
                Term::Lam(..) => write_parens(out, f),
                _ => write_spine(out, f),
            }
            out.push(' ');
            write_atom(out, a);
        }
        Term::Ite(c, a, b) => write_prefix(out, "ite", &[c, a, b]),
        Term::Foldr(f, e, l) => write_prefix(out, "foldr", &[f, e, l]),
        Term::Cons(h, tl) if list_elems(t).is_none() => write_prefix(out, "(:)", &[h, tl]),
        _ => write_atom(out, t),
    }
}

fn write_prefix(out: &mut String, head: &str, args: &[&Term]) {
    out.push_str(head);
    for a in args {
        out.push(' ');
        write_atom(out, a);
    }
}

fn write_parens(out: &mut String, t: &Term) {
    out.push('(');
    write_top(out, t);
    out.push(')');
}

fn write_atom(out: &mut String, t: &Term) {
    match t {
        Term::Var(x) => {
            let _ = write!(out, "{x}");
        }
        Term::Unit => out.push_str("()"),
        Term::True => out.push_str("True"),
        Term::False => out.push_str("False"),
        Term::Nil(_) => out.push_str("[]"),
        Term::Cons(..) if is_atomic(t) => {
            out.push('[');
            for (i, e) in list_elems(t).unwrap_or_default().into_iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_top(out, e);
            }
            out.push(']');
        }
        _ => write_parens(out, t),
    }
}
