//! S-expression reader and the formula grammar.
//!
//! Grammar: `(and f...) (or f...) (not f) (box f) (dia f) (imp f g)
//! (iff f g) (boxn k f) (boxstar f) (var name) (top) (bot)`.

use std::fmt;

use thiserror::Error;

use super::formula::{self, Formula};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => write!(f, "{a}"),
            Sexpr::List(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Reader<'a> {
        Reader {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b';') => {
                    while let Some(c) = self.bump() {
                        if c == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn read(&mut self) -> Result<Sexpr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(self.error("unclosed parenthesis")),
                        Some(b')') => {
                            self.bump();
                            return Ok(Sexpr::List(items));
                        }
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some(b')') => Err(self.error("unexpected closing parenthesis")),
            _ => {
                let mut atom = Vec::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    atom.push(c);
                    self.bump();
                }
                Ok(Sexpr::Atom(String::from_utf8(atom).map_err(|_| {
                    self.error("atom is not valid utf-8")
                })?))
            }
        }
    }
}

pub fn read_sexpr(src: &str) -> Result<Sexpr, ParseError> {
    let mut reader = Reader::new(src);
    let e = reader.read()?;
    reader.skip_ws();
    if reader.peek().is_some() {
        return Err(reader.error("trailing input after expression"));
    }
    Ok(e)
}

/// Reads zero or more expressions separated by whitespace.
pub fn read_sexprs(src: &str) -> Result<Vec<Sexpr>, ParseError> {
    let mut reader = Reader::new(src);
    let mut out = Vec::new();
    loop {
        reader.skip_ws();
        if reader.peek().is_none() {
            return Ok(out);
        }
        out.push(reader.read()?);
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let e = read_sexpr(src)?;
    formula_from_sexpr(&e)
}

fn at(msg: impl Into<String>) -> ParseError {
    ParseError {
        line: 0,
        col: 0,
        msg: msg.into(),
    }
}

pub fn formula_from_sexpr(e: &Sexpr) -> Result<Formula, ParseError> {
    let items = match e {
        Sexpr::Atom(a) => return Err(at(format!("formula must be a list, found atom `{a}`"))),
        Sexpr::List(items) => items,
    };
    let head = match items.first() {
        Some(Sexpr::Atom(h)) => h.as_str(),
        _ => return Err(at("formula list must start with an operator")),
    };
    let args = &items[1..];
    let arity = |n: usize| -> Result<(), ParseError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(at(format!("`{head}` expects {n} arguments, found {}", args.len())))
        }
    };
    match head {
        "var" => {
            arity(1)?;
            match &args[0] {
                Sexpr::Atom(name) => Ok(formula::var(name.clone())),
                _ => Err(at("`var` expects a name")),
            }
        }
        "top" => {
            arity(0)?;
            Ok(formula::top())
        }
        "bot" => {
            arity(0)?;
            Ok(formula::bot())
        }
        "not" => {
            arity(1)?;
            Ok(formula::neg(formula_from_sexpr(&args[0])?))
        }
        "box" => {
            arity(1)?;
            Ok(formula::bx(formula_from_sexpr(&args[0])?))
        }
        "boxstar" => {
            arity(1)?;
            Ok(formula::boxstar(formula_from_sexpr(&args[0])?))
        }
        "dia" => {
            arity(1)?;
            Ok(formula::dia(formula_from_sexpr(&args[0])?))
        }
        "imp" => {
            arity(2)?;
            Ok(formula::imp(
                formula_from_sexpr(&args[0])?,
                formula_from_sexpr(&args[1])?,
            ))
        }
        "iff" => {
            arity(2)?;
            Ok(formula::iff(
                formula_from_sexpr(&args[0])?,
                formula_from_sexpr(&args[1])?,
            ))
        }
        "boxn" => {
            arity(2)?;
            let n = match &args[0] {
                Sexpr::Atom(a) => a
                    .parse::<usize>()
                    .map_err(|_| at("`boxn` expects a count"))?,
                _ => return Err(at("`boxn` expects a count")),
            };
            Ok(formula::boxn(n, formula_from_sexpr(&args[1])?))
        }
        "and" => Ok(formula::and(
            args.iter()
                .map(formula_from_sexpr)
                .collect::<Result<Vec<_>, _>>()?,
        )),
        "or" => Ok(formula::or(
            args.iter()
                .map(formula_from_sexpr)
                .collect::<Result<Vec<_>, _>>()?,
        )),
        other => Err(at(format!("unknown operator `{other}`"))),
    }
}

/// Canonical printing; `parse(print(f)) == f`.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::formula::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_formula("(box (var x))").unwrap(), bx(var("x")));
        assert_eq!(parse_formula("(and)").unwrap(), top());
        assert_eq!(
            parse_formula("(dia (var x))").unwrap(),
            neg(bx(neg(var("x"))))
        );
        assert_eq!(
            parse_formula("(boxn 2 (var x))").unwrap(),
            bx(bx(var("x")))
        );
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = parse_formula("(and (var x)").unwrap_err();
        assert_eq!((err.line, err.col), (1, 13));
        let err = parse_formula("\n  )").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }

    #[test]
    fn print_parse_round_trip() {
        let cases = [
            top(),
            bot(),
            var("x"),
            dia(var("x")),
            imp(var("x"), bx(var("y"))),
            and([or([var("x"), neg(var("y"))]), bx(top())]),
            boxstar(var("x")),
        ];
        for f in cases {
            assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
        }
    }
}
