use std::collections::HashMap;

use num_traits::ToPrimitive;

use super::{Expr, ExprError, Symbol, TrigKind};

fn trig_value(kind: TrigKind, m: u32, phi: f64) -> f64 {
    let x = m as f64 * phi;
    match kind {
        TrigKind::Sin => x.sin(),
        TrigKind::Cos => x.cos(),
    }
}

fn power(base: f64, e: i32, s: &Symbol) -> Result<f64, ExprError> {
    if e < 0 && base == 0.0 {
        return Err(ExprError::Domain(format!("{s} = 0 raised to the power {e}")));
    }
    Ok(base.powi(e))
}

impl Expr {
    /// Floating point value under `env`; every occurring symbol must be bound.
    pub fn eval(&self, env: &HashMap<Symbol, f64>) -> Result<f64, ExprError> {
        let lookup = |s: &Symbol| env.get(s).copied().ok_or_else(|| ExprError::Unbound(s.to_string()));
        let mut acc = 0.0;
        for (m, q) in self.terms() {
            let mut v = q.to_f64().unwrap_or(f64::NAN);
            for (s, e) in m.factors() {
                v *= power(lookup(s)?, *e, s)?;
            }
            if let Some(t) = m.trig() {
                v *= trig_value(t.kind, t.m, lookup(&Symbol::Phi)?);
            }
            acc += v;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone)]
struct Term {
    coeff: f64,
    factors: Vec<(usize, i32)>,
    trig: Option<(TrigKind, u32)>,
    negative_power: bool,
}

/// An [`Expr`] lowered to slot indices for repeated evaluation.
///
/// Parameters may be frozen at compile time; the remaining symbols are read
/// from a slice ordered like `vars`.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    terms: Vec<Term>,
    phi_slot: Option<usize>,
    vars: Vec<Symbol>,
}

impl CompiledExpr {
    pub fn new(e: &Expr, vars: &[Symbol], frozen: &HashMap<Symbol, f64>) -> Result<Self, ExprError> {
        let slot = |s: &Symbol| vars.iter().position(|v| v == s);
        let mut terms = Vec::with_capacity(e.len());
        for (m, q) in e.terms() {
            let mut coeff = q.to_f64().unwrap_or(f64::NAN);
            let mut factors = Vec::new();
            let mut negative_power = false;
            for (s, p) in m.factors() {
                if let Some(i) = slot(s) {
                    factors.push((i, *p));
                    negative_power |= *p < 0;
                } else if let Some(v) = frozen.get(s) {
                    coeff *= power(*v, *p, s)?;
                } else {
                    return Err(ExprError::Unbound(s.to_string()));
                }
            }
            let trig = m.trig().map(|t| (t.kind, t.m));
            terms.push(Term { coeff, factors, trig, negative_power });
        }
        let phi_slot = slot(&Symbol::Phi);
        if phi_slot.is_none() && terms.iter().any(|t| t.trig.is_some()) {
            return Err(ExprError::Unbound("phi".into()));
        }
        Ok(CompiledExpr { terms, phi_slot, vars: vars.to_vec() })
    }

    pub fn vars(&self) -> &[Symbol] {
        &self.vars
    }

    /// Whether some variable slot carries a negative exponent.
    pub fn has_negative_powers(&self, slot: usize) -> bool {
        self.terms.iter().any(|t| t.factors.iter().any(|&(i, p)| i == slot && p < 0))
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let mut v = t.coeff;
            for &(i, p) in &t.factors {
                v *= values[i].powi(p);
            }
            if let Some((kind, m)) = t.trig {
                v *= trig_value(kind, m, values[self.phi_slot.expect("checked at compile time")]);
            }
            acc += v;
        }
        acc
    }

    /// Like [`CompiledExpr::eval`] but reports a domain error for `0^-n`.
    pub fn try_eval(&self, values: &[f64]) -> Result<f64, ExprError> {
        for t in self.terms.iter().filter(|t| t.negative_power) {
            for &(i, p) in &t.factors {
                if p < 0 && values[i] == 0.0 {
                    return Err(ExprError::Domain(format!("{} = 0 raised to the power {p}", self.vars[i])));
                }
            }
        }
        Ok(self.eval(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn env(pairs: &[(Symbol, f64)]) -> HashMap<Symbol, f64> {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn first_integral_value() {
        let i01 = parse("(1/2)*u^2 + (1/2)*up^2").unwrap();
        assert_eq!(i01.eval(&env(&[(Symbol::u(), 1.0), (Symbol::up(), 0.0)])).unwrap(), 0.5);
        assert_eq!(Expr::zero().eval(&HashMap::new()).unwrap(), 0.0);
        let s = Expr::sin(2).eval(&env(&[(Symbol::Phi, 0.3)])).unwrap();
        assert!((s - 0.5646424733950354).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let e = parse("u^-2 + a").unwrap();
        assert!(matches!(e.eval(&env(&[(Symbol::u(), 1.0)])), Err(ExprError::Unbound(n)) if n == "a"));
        assert!(matches!(
            e.eval(&env(&[(Symbol::u(), 0.0), (Symbol::param("a"), 1.0)])),
            Err(ExprError::Domain(_))
        ));
    }

    #[test]
    fn compiled_agrees() {
        let e = parse("kappa*u^2*cos(phi) - ell^-2*up + phi*sin(2*phi)").unwrap();
        let frozen = env(&[(Symbol::param("kappa"), 0.5), (Symbol::param("ell"), 2.0)]);
        let vars = [Symbol::Phi, Symbol::u(), Symbol::up()];
        let c = CompiledExpr::new(&e, &vars, &frozen).unwrap();
        let mut full = frozen.clone();
        full.extend(env(&[(Symbol::Phi, 0.7), (Symbol::u(), 1.3), (Symbol::up(), -0.2)]));
        let want = e.eval(&full).unwrap();
        assert!((c.eval(&[0.7, 1.3, -0.2]) - want).abs() < 1e-14);
        assert!(CompiledExpr::new(&e, &vars, &HashMap::new()).is_err());
        let r = CompiledExpr::new(&parse("u^-3").unwrap(), &vars, &HashMap::new()).unwrap();
        assert!(r.has_negative_powers(1));
        assert!(r.try_eval(&[0.0, 0.0, 0.0]).is_err());
    }
}
