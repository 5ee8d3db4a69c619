use std::fmt;

use num_traits::{One, Signed};

use super::{Expr, Monomial, Rational, TrigKind};

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (s, e) in m.factors() {
        if !first {
            f.write_str("*")?;
        }
        first = false;
        write!(f, "{s}")?;
        if *e != 1 {
            write!(f, "^{e}")?;
        }
    }
    if let Some(t) = m.trig() {
        if !first {
            f.write_str("*")?;
        }
        let name = match t.kind {
            TrigKind::Sin => "sin",
            TrigKind::Cos => "cos",
        };
        if t.m == 1 {
            write!(f, "{name}(phi)")?;
        } else {
            write!(f, "{name}({}*phi)", t.m)?;
        }
    }
    Ok(())
}

/// Writes `|q| * m` without a sign.
fn write_term(f: &mut fmt::Formatter<'_>, m: &Monomial, q: &Rational) -> fmt::Result {
    let a = q.abs();
    if m.is_one() {
        return write!(f, "{a}");
    }
    if !a.is_one() {
        if a.is_integer() {
            write!(f, "{a}*")?;
        } else {
            write!(f, "({a})*")?;
        }
    }
    write_monomial(f, m)
}

impl fmt::Display for Expr {
    /// Canonical text in the expression grammar; `parse` inverts it.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, q)) in self.terms().enumerate() {
            match (i, q.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write_term(f, m, q)?;
        }
        Ok(())
    }
}

/// Canonical printed form of `e`.
pub fn print_canonical(e: &Expr) -> String {
    e.to_string()
}
