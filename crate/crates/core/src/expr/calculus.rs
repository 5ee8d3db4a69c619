use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::{Expr, ExprError, Monomial, Rational, Symbol, TrigKind};

/// Derivative of a single factor `s^e` with respect to `v`, as an expression.
fn factor_derivative(s: &Symbol, e: i32, v: &Symbol) -> Option<Expr> {
    let lowered = || Expr::term(Rational::from_integer(BigInt::from(e)), Monomial::from_parts(vec![(s.clone(), e - 1)], None));
    if s == v {
        return Some(lowered());
    }
    if let Symbol::Func { name, d_phi, d_u } = s {
        let inner = match v {
            Symbol::Phi => Symbol::Func { name: name.clone(), d_phi: d_phi + 1, d_u: *d_u },
            Symbol::Jet(0) => Symbol::Func { name: name.clone(), d_phi: *d_phi, d_u: d_u + 1 },
            _ => return None,
        };
        return Some(&lowered() * &Expr::sym(inner));
    }
    None
}

impl Expr {
    /// Partial derivative with every symbol other than `v` held fixed.
    /// Abstract point functions `f[..]` depend on `phi` and `u` only.
    pub fn diff(&self, v: &Symbol) -> Expr {
        let mut out = Expr::zero();
        for (m, q) in self.terms() {
            for (i, (s, e)) in m.factors().iter().enumerate() {
                if let Some(d) = factor_derivative(s, *e, v) {
                    let mut rest = m.factors().to_vec();
                    rest.remove(i);
                    let rest = Monomial::from_parts(rest, m.trig());
                    out += &d.mul_monomial(&rest, q);
                }
            }
            if let (Symbol::Phi, Some(t)) = (v, m.trig()) {
                let k = Rational::from_integer(BigInt::from(t.m));
                let (kind, c) = match t.kind {
                    TrigKind::Sin => (TrigKind::Cos, k),
                    TrigKind::Cos => (TrigKind::Sin, -k),
                };
                let base = Monomial::from_parts(m.factors().to_vec(), None);
                out += &Expr::trig(kind, t.m as i64).mul_monomial(&base, &(c * q));
            }
        }
        out
    }

    /// Total derivative in `phi`: `e_phi + sum_n u^(n+1) e_{u^(n)}`.
    pub fn total_derivative(&self) -> Expr {
        let mut out = self.diff(&Symbol::Phi);
        if let Some(top) = self.max_jet() {
            assert!(top < super::MAX_JET_ORDER, "jet order exceeds the supported range");
            for n in 0..=top {
                let d = self.diff(&Symbol::Jet(n));
                if !d.is_zero() {
                    out += &(&Expr::jet(n + 1) * &d);
                }
            }
        } else if self.symbols().iter().any(|s| matches!(s, Symbol::Func { .. })) {
            // point functions still depend on u through the chain rule
            let d = self.diff(&Symbol::Jet(0));
            if !d.is_zero() {
                out += &(&Expr::up() * &d);
            }
        }
        out
    }

    /// Simultaneous substitution of symbols; `phi` may only be mapped to an
    /// integer multiple of `phi` when trig factors are present.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        let mut powers: BTreeMap<(Symbol, i32), Expr> = BTreeMap::new();
        for (m, q) in self.terms() {
            let mut acc = Expr::constant(q.clone());
            let mut kept = Vec::new();
            for (s, e) in m.factors() {
                match bindings.get(s) {
                    Some(b) => {
                        let key = (s.clone(), *e);
                        if !powers.contains_key(&key) {
                            powers.insert(key.clone(), b.pow(*e as i64)?);
                        }
                        acc = &acc * &powers[&key];
                    }
                    None => kept.push((s.clone(), *e)),
                }
            }
            let trig = match (m.trig(), bindings.get(&Symbol::Phi)) {
                (Some(t), Some(phi)) => {
                    let arg = phi.scale(&Rational::from_integer(BigInt::from(t.m)));
                    Expr::trig_of(t.kind, &arg).ok_or(ExprError::TrigArgument { pos: 0 })?
                }
                (Some(t), None) => Expr::term(Rational::one(), Monomial::from_parts(vec![], Some(t))),
                (None, _) => Expr::one(),
            };
            let kept = Monomial::from_parts(kept, None);
            out += &(&acc * &trig).mul_monomial(&kept, &Rational::one());
        }
        Ok(out)
    }

    /// Convenience wrapper for a single binding.
    pub fn subs(&self, s: &Symbol, value: &Expr) -> Result<Expr, ExprError> {
        let mut b = BTreeMap::new();
        b.insert(s.clone(), value.clone());
        self.substitute(&b)
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Expr, Symbol};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn partial_derivatives() {
        let g1 = p("(1/2)*a0*u^2 + a1*u + a2");
        assert_eq!(g1.diff(&Symbol::u()), p("a0*u + a1"));
        let gup = p("-(1/2)*upp^2");
        assert!(gup.diff(&Symbol::up()).is_zero());
        assert_eq!(gup.diff(&Symbol::upp()), p("-upp"));
        assert_eq!(p("u^-2").diff(&Symbol::u()), p("-2*u^-3"));
        assert_eq!(p("phi*sin(2*phi)").diff(&Symbol::Phi), p("sin(2*phi) + 2*phi*cos(2*phi)"));
        assert_eq!(p("a0*u").diff(&Symbol::param("a0")), p("u"));
    }

    #[test]
    fn total_derivatives() {
        assert_eq!(p("u^2").total_derivative(), p("2*u*up"));
        assert_eq!(p("-u*cos(phi)").total_derivative(), p("u*sin(phi) - up*cos(phi)"));
        assert_eq!(p("sin(2*phi)").total_derivative(), p("2*cos(2*phi)"));
        assert_eq!(p("upp^2").total_derivative(), p("2*upp*uppp"));
        assert_eq!(p("eta1[]").total_derivative(), p("eta1[phi] + up*eta1[u]"));
        assert_eq!(p("eta1[u]*u").total_derivative(), p("u*eta1[phi,u] + u*up*eta1[u,u] + up*eta1[u]"));
    }

    #[test]
    fn substitution() {
        let g = p("a0*u^2/2 + a1*u + a2");
        let zero = Expr::zero();
        let mut b = std::collections::BTreeMap::new();
        for a in ["a0", "a1", "a2"] {
            b.insert(Symbol::param(a), zero.clone());
        }
        assert!(g.substitute(&b).unwrap().is_zero());

        let lag2 = p("-(1/2)*ell^-2*u - (1/2)*u^3");
        assert_eq!(lag2.subs(&Symbol::param("ell"), &Expr::one()).unwrap(), p("-u/2 - u^3/2"));

        let d_i04 = p("-up*sin(phi) + u*cos(phi)").total_derivative();
        assert!(d_i04.subs(&Symbol::upp(), &p("-u")).unwrap().is_zero());

        assert!(p("sin(phi)").subs(&Symbol::Phi, &p("u")).is_err());
        assert_eq!(p("sin(phi)").subs(&Symbol::Phi, &p("2*phi")).unwrap(), p("sin(2*phi)"));
        assert!(p("u^-1").subs(&Symbol::u(), &p("u + 1")).is_err());
    }
}
