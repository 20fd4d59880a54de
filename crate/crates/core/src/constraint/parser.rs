//! Recursive-descent parser for the constraint language.
//!
//! ```text
//! constraint := atom ("&&" atom)*
//! atom       := expr rel expr
//! rel        := "<=" | "<" | ">=" | ">" | "=="
//! expr       := term (("+" | "-") term)*
//! term       := unary (("*" | "/") unary)*
//! unary      := "-" unary | power
//! power      := primary ("^" integer)?
//! primary    := number | ident | "sqrt" "(" expr ")" | "(" expr ")"
//! ```

use super::{Atom, Expr, Rel};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Op(&'static str),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn text(&self) -> &str {
        match self {
            Tok::Num(_, s) | Tok::Ident(s) => s,
            Tok::Op(o) => o,
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::End => "end of input",
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

const OPS: [&str; 11] = ["&&", "<=", ">=", "==", "<", ">", "+", "-", "*", "/", "^"];

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (p, t) = lx.next()?;
            let end = t == Tok::End;
            out.push((p, t));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(usize, Tok)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if start >= bytes.len() {
            return Ok((start, Tok::End));
        }
        let c = bytes[start];
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            return Ok((start, Tok::Ident(self.src[start..self.pos].to_string())));
        }
        match c {
            b'(' => {
                self.pos += 1;
                return Ok((start, Tok::LParen));
            }
            b')' => {
                self.pos += 1;
                return Ok((start, Tok::RParen));
            }
            _ => {}
        }
        for op in OPS {
            if self.src[start..].starts_with(op) {
                self.pos += op.len();
                return Ok((start, Tok::Op(op)));
            }
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(Error::Syntax {
            pos: start,
            msg: format!("unexpected character `{ch}`"),
        })
    }

    fn number(&mut self, start: usize) -> Result<(usize, Tok)> {
        let bytes = self.src.as_bytes();
        let digits = |p: &mut usize| {
            let s = *p;
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > s
        };
        let mut p = start;
        let int_part = digits(&mut p);
        let mut frac_part = false;
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            frac_part = digits(&mut p);
        }
        if !int_part && !frac_part {
            return Err(Error::Syntax {
                pos: start,
                msg: "malformed number".into(),
            });
        }
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        self.pos = p;
        let text = &self.src[start..p];
        let v: f64 = text.parse().map_err(|_| Error::Syntax {
            pos: start,
            msg: format!("malformed number `{text}`"),
        })?;
        Ok((start, Tok::Num(v, text.to_string())))
    }
}

pub(super) struct Parser<'v> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    vars: &'v [String],
}

impl<'v> Parser<'v> {
    pub(super) fn new(src: &str, vars: &'v [String]) -> Result<Parser<'v>> {
        Ok(Parser {
            toks: Lexer::tokens(src)?,
            at: 0,
            vars,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Tok::Op(o) if *o == op) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(super) fn constraint(mut self) -> Result<Vec<Atom>> {
        let mut atoms = vec![self.atom()?];
        while self.eat_op("&&") {
            atoms.push(self.atom()?);
        }
        if *self.peek() != Tok::End {
            return self.err("expected `&&` or end of input");
        }
        Ok(atoms)
    }

    fn atom(&mut self) -> Result<Atom> {
        let lhs = self.expr()?;
        let rel = match self.peek() {
            Tok::Op("<=") => Rel::Le,
            Tok::Op("<") => Rel::Lt,
            Tok::Op(">=") => Rel::Ge,
            Tok::Op(">") => Rel::Gt,
            Tok::Op("==") => Rel::Eq,
            _ => return self.err("expected a relation (<=, <, >=, >, ==)"),
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(Atom::new(lhs, rel, rhs))
    }

    pub(super) fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat_op("+") {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat_op("-") {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat_op("*") {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat_op("/") {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat_op("^") {
            let pos = self.pos();
            return match self.bump() {
                Tok::Num(v, text) if text.bytes().all(|b| b.is_ascii_digit()) => {
                    if v > u32::MAX as f64 {
                        return Err(Error::Syntax {
                            pos,
                            msg: "exponent too large".into(),
                        });
                    }
                    Ok(Expr::Pow(Box::new(base), v as u32))
                }
                _ => Err(Error::Syntax {
                    pos,
                    msg: "exponent must be a non-negative integer literal".into(),
                }),
            };
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v, _) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) if name == "sqrt" => {
                if self.bump() != Tok::LParen {
                    return Err(Error::Syntax {
                        pos: self.toks[self.at.saturating_sub(1)].0,
                        msg: "expected `(` after sqrt".into(),
                    });
                }
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::Sqrt(Box::new(e)))
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(Expr::Var(i)),
                None => Err(Error::UndeclaredVariable { name, pos }),
            },
            Tok::End => Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            t => Err(Error::Syntax {
                pos,
                msg: format!("unexpected `{}`", t.text()),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            self.err("expected `)`")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn parse_expr(src: &str, vars: &[String]) -> Result<Expr> {
        Parser::new(src, vars)?.expr()
    }

    #[test]
    fn precedence_and_associativity() {
        let v = names(&["x", "y"]);
        let e = parse_expr("x - y - 1", &v).unwrap();
        assert_eq!(e.eval(&[5.0, 2.0]), 2.0);
        let e = parse_expr("-x^2", &v).unwrap();
        assert_eq!(e.eval(&[3.0, 0.0]), -9.0);
        let e = parse_expr("2 * -y / 4", &v).unwrap();
        assert_eq!(e.eval(&[0.0, 2.0]), -1.0);
    }

    #[test]
    fn scientific_literals() {
        let e = parse_expr("1.5e-3 + .5 + 2.", &[]).unwrap();
        assert!((e.eval(&[]) - 2.5015).abs() < 1e-15);
    }

    #[test]
    fn non_integer_exponent_is_rejected() {
        let err = parse_expr("x^2.5", &names(&["x"])).unwrap_err();
        assert!(matches!(err, Error::Syntax { pos: 2, .. }), "{err:?}");
        assert!(parse_expr("x^y", &names(&["x", "y"])).is_err());
    }

    #[test]
    fn reports_position_of_bad_character() {
        let err = parse_expr("x + $", &names(&["x"])).unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                pos: 4,
                msg: "unexpected character `$`".into()
            }
        );
    }
}
