//! Recursive descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := ('-' | '+') unary | power
//! power    := atom ('^' exponent)?
//! exponent := ('-' | '+')? (INT | '(' expr ')')
//! atom     := INT | IDENT | ('sin' | 'cos') '(' expr ')' | IDENT '[' vars ']' | '(' expr ')'
//! ```
//!
//! `p/q` with integer operands is an exact rational; division by anything but a
//! single trig-free term is rejected. `name[phi,u,u]` denotes a partial
//! derivative of an abstract point function `name(phi, u)`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{Expr, ExprError, Symbol, TrigKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                return Err(ExprError::Syntax { pos: i, msg: "decimal literals are not allowed; use p/q".into() });
            }
            out.push((start, Tok::Int(text[start..i].parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()[],".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ExprError::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ExprError::Syntax { pos: self.offset(), msg: format!("expected `{c}`") })
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc += &self.term()?;
            } else if self.eat('-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                let at = self.offset();
                self.pos += 1;
                let rhs = self.unary()?;
                if rhs.is_zero() {
                    return Err(ExprError::Syntax { pos: at, msg: "division by zero".into() });
                }
                acc = acc.div(&rhs)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let mut sign = 1i64;
        while self.peek() == Some(&Tok::Op('-')) || self.peek() == Some(&Tok::Op('+')) {
            if self.eat('-') {
                sign = -sign;
            } else {
                self.pos += 1;
            }
        }
        let exponent = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                n.to_i64().ok_or(ExprError::NonIntegerExponent { pos: at })?
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                match e.as_constant() {
                    Some(q) if q.is_integer() => q.numer().to_i64().ok_or(ExprError::NonIntegerExponent { pos: at })?,
                    _ => return Err(ExprError::NonIntegerExponent { pos: at }),
                }
            }
            _ => return Err(ExprError::NonIntegerExponent { pos: at }),
        };
        let exponent = sign * exponent;
        if base.is_zero() && exponent < 0 {
            return Err(ExprError::Domain("zero raised to a negative power".into()));
        }
        base.pow(exponent)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::constant(super::Rational::from_integer(n)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.ident(name, at)
            }
            Some(Tok::Op(c)) => Err(ExprError::Syntax { pos: at, msg: format!("unexpected `{c}`") }),
            None => Err(ExprError::Syntax { pos: at, msg: "unexpected end of input".into() }),
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Expr, ExprError> {
        if name == "sin" || name == "cos" {
            self.expect('(')?;
            let arg = self.expr()?;
            self.expect(')')?;
            let kind = if name == "sin" { TrigKind::Sin } else { TrigKind::Cos };
            return Expr::trig_of(kind, &arg).ok_or(ExprError::TrigArgument { pos: at });
        }
        if self.eat('[') {
            let (mut d_phi, mut d_u) = (0u8, 0u8);
            if !self.eat(']') {
                loop {
                    let here = self.offset();
                    match self.peek().cloned() {
                        Some(Tok::Ident(v)) if v == "phi" => d_phi += 1,
                        Some(Tok::Ident(v)) if v == "u" => d_u += 1,
                        _ => {
                            return Err(ExprError::Syntax { pos: here, msg: "function derivatives are taken in `phi` or `u`".into() })
                        }
                    }
                    self.pos += 1;
                    if self.eat(']') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            return Ok(Expr::sym(Symbol::Func { name, d_phi, d_u }));
        }
        if let Some(s) = Symbol::reserved(&name) {
            return Ok(Expr::sym(s));
        }
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            && name.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if !valid {
            return Err(ExprError::Syntax { pos: at, msg: format!("invalid parameter name `{name}`") });
        }
        Ok(Expr::param(&name))
    }
}

/// Parses `text` into its canonical [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ExprError::Syntax { pos: p.offset(), msg: "trailing input".into() });
    }
    Ok(e)
}
