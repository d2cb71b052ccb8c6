//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := ['-'] INT '*' term | factor (('*' | '/') factor)*
//! factor   := INT | monomial | call | '(' expr ')' | '-' factor
//! monomial := ['-'] 'q' ['^' ['-'] INT]
//! call     := NAME '(' arg (',' arg)? ')'
//! arg      := ['-'] 'q' ['^' ['-'] INT] | '1' | '-1'
//! ```
//!
//! A leading integer followed by `*` scales the whole rest of the term, so
//! `2*q*psi(q^8)` reads as `2·(q·psi(q^8))`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::{MonomialArg, ThetaExpr};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v: BigInt = text[start..i].parse().expect("ascii digits");
                out.push((Tok::Int(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character {ch:?}"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

fn small_int(v: &BigInt, pos: usize) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::Parse {
        pos,
        msg: "exponent out of range".into(),
    })
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<ThetaExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = lhs.add(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = lhs.sub(self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ThetaExpr> {
        // INT '*' term, possibly negated
        let (neg, off) = if *self.peek() == Tok::Minus { (true, 1) } else { (false, 0) };
        if let (Tok::Int(v), Tok::Star) = (self.peek_at(off).clone(), self.peek_at(off + 1)) {
            self.i += off + 2;
            let rest = self.term()?;
            return Ok(rest.scale(if neg { -v } else { v }));
        }
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = lhs.mul(self.factor()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = lhs.div(self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    /// `'^' ['-'] INT` after a `q`; absent means exponent 1.
    fn exponent(&mut self) -> Result<i64> {
        if *self.peek() != Tok::Caret {
            return Ok(1);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        match self.bump() {
            Tok::Int(v) => {
                let e = small_int(&v, pos)?;
                Ok(if neg { -e } else { e })
            }
            _ => Err(Error::Parse {
                pos,
                msg: "expected integer exponent".into(),
            }),
        }
    }

    fn factor(&mut self) -> Result<ThetaExpr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(v) => Ok(ThetaExpr::int(v)),
            Tok::Minus => match self.peek().clone() {
                Tok::Ident(name) if name == "q" => {
                    self.bump();
                    Ok(ThetaExpr::monomial(-1, self.exponent()?))
                }
                Tok::Int(v) => {
                    self.bump();
                    Ok(ThetaExpr::int(-v))
                }
                _ => Ok(self.factor()?.scale(-1)),
            },
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == "q" {
                    return Ok(ThetaExpr::monomial(1, self.exponent()?));
                }
                self.call(name, pos)
            }
            _ => Err(Error::Parse {
                pos,
                msg: "expected a number, q, a function call or '('".into(),
            }),
        }
    }

    fn arg(&mut self) -> Result<MonomialArg> {
        let sign = if *self.peek() == Tok::Minus {
            self.bump();
            -1
        } else {
            1
        };
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(name) if name == "q" => Ok(MonomialArg::new(sign, self.exponent()?)),
            Tok::Int(v) if v.is_one() => Ok(MonomialArg::new(sign, 0)),
            _ => Err(Error::Parse {
                pos,
                msg: "function arguments must be ±q^k or ±1".into(),
            }),
        }
    }

    fn call(&mut self, name: String, pos: usize) -> Result<ThetaExpr> {
        if !matches!(name.as_str(), "f" | "phi" | "psi" | "chi" | "G" | "H") {
            return Err(Error::Parse {
                pos,
                msg: format!("unknown function `{name}`"),
            });
        }
        self.expect(Tok::LParen, "'(' after function name")?;
        let mut args = vec![self.arg()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.arg()?);
        }
        self.expect(Tok::RParen, "')'")?;
        let arity_err = |expected| Error::Arity {
            name: name.clone(),
            expected,
            got: args.len(),
        };
        Ok(match (name.as_str(), args.as_slice()) {
            ("f", [m]) => ThetaExpr::Euler(*m),
            ("f", [a, b]) => ThetaExpr::Theta(*a, *b),
            ("f", _) => return Err(arity_err("1 or 2")),
            (_, [m]) => match name.as_str() {
                "phi" => ThetaExpr::Phi(*m),
                "psi" => ThetaExpr::Psi(*m),
                "chi" => ThetaExpr::Chi(*m),
                "G" => ThetaExpr::G(*m),
                _ => ThetaExpr::H(*m),
            },
            _ => return Err(arity_err("1")),
        })
    }
}

/// Parses an expression in the theta grammar.
pub fn parse(text: &str) -> Result<ThetaExpr> {
    let mut p = Parser { toks: lex(text)?, i: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}
