//! Separation of a residual into jet monomials, powers of `u` and phi-basis
//! functions, producing an exact homogeneous linear system.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Basis, Expr, Monomial, Rational, Symbol};
use crate::linalg::{self, Row};

/// Splits `residual` by its monomial in the derivative jets `up, upp, ...`.
/// The values depend on `phi`, `u` and parameters only.
pub fn collect_jet(residual: &Expr) -> BTreeMap<Monomial, Expr> {
    let mut out: BTreeMap<Monomial, Expr> = BTreeMap::new();
    for (m, q) in residual.terms() {
        let jet = m.filtered(|s| matches!(s, Symbol::Jet(n) if *n >= 1), false);
        let rest = m.filtered(|s| !matches!(s, Symbol::Jet(n) if *n >= 1), true);
        out.entry(jet).or_default().add_term(rest, q.clone());
    }
    out
}

/// Where a determining equation came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub jet: Monomial,
    pub u_power: i32,
    pub element: usize,
}

impl Provenance {
    /// `jet * u^n * element` as an expression.
    pub fn monomial(&self, basis: &Basis) -> Expr {
        let e = &basis.elements()[self.element];
        let u = Monomial::from_parts(vec![(Symbol::u(), self.u_power)], None);
        e.to_expr().mul_monomial(&self.jet, &Rational::from_integer(1.into())).mul_monomial(&u, &Rational::from_integer(1.into()))
    }

    pub fn describe(&self, basis: &Basis) -> String {
        let jet = Expr::term(Rational::from_integer(1.into()), self.jet.clone());
        format!("({}, u^{}, {})", jet, self.u_power, basis.elements()[self.element].name())
    }
}

/// Decomposes a function of `(phi, u)` with parameter coefficients over
/// `u^n * basis`. Fails with a basis overflow when a term leaves the span or
/// the allowed range of `u` powers.
pub fn expand_in_basis(coeff: &Expr, basis: &Basis, u_range: (i32, i32)) -> Result<BTreeMap<(i32, usize), Expr>> {
    let mut out: BTreeMap<(i32, usize), Expr> = BTreeMap::new();
    for (m, q) in coeff.terms() {
        let n = m.power(&Symbol::u());
        let p = m.power(&Symbol::Phi);
        if let Some((s, _)) = m.factors().iter().find(|(s, _)| matches!(s, Symbol::Jet(k) if *k >= 1) || matches!(s, Symbol::Func { .. })) {
            return Err(Error::Input(format!("unexpected symbol `{s}` in a phi-u coefficient")));
        }
        let overflow = |why: &str| Error::BasisOverflow {
            term: Expr::term(q.clone(), m.clone()).to_string(),
            advice: why.to_string(),
        };
        if n < u_range.0 || n > u_range.1 {
            return Err(overflow("widen the u-power range (--u-min/--u-max)"));
        }
        let idx = if p < 0 { None } else { basis.index_of(p as u32, m.trig()) };
        let Some(idx) = idx else {
            return Err(overflow("enlarge the phi basis (--basis-p/--basis-m)"));
        };
        let params = m.filtered(|s| matches!(s, Symbol::Param(_)), false);
        out.entry((n, idx)).or_default().add_term(params, q.clone());
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Homogeneous linear equations `sum_j row[j] * unknown_j = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingSystem {
    pub unknowns: Vec<String>,
    pub basis: Basis,
    pub u_range: (i32, i32),
    /// Sorted by provenance; provenances are unique.
    pub rows: Vec<(Provenance, Row)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowDump {
    pub provenance: String,
    pub coefficients: Vec<(String, String)>,
}

impl DeterminingSystem {
    /// Builds the system from the residual contribution of each unknown.
    pub fn from_columns(unknowns: Vec<String>, columns: &[Expr], basis: Basis, u_range: (i32, i32)) -> Result<Self> {
        assert_eq!(unknowns.len(), columns.len());
        let mut rows: BTreeMap<Provenance, Row> = BTreeMap::new();
        for (j, col) in columns.iter().enumerate() {
            for (jet, c) in collect_jet(col) {
                for ((n, idx), q) in expand_in_basis(&c, &basis, u_range)? {
                    let prov = Provenance { jet: jet.clone(), u_power: n, element: idx };
                    rows.entry(prov).or_default().insert(j, q);
                }
            }
        }
        Ok(DeterminingSystem { unknowns, basis, u_range, rows: rows.into_iter().collect() })
    }

    /// Extracts the linear forms of a residual that is linear and homogeneous
    /// in the parameters named by `unknowns`.
    pub fn from_residual(residual: &Expr, unknowns: &[String], basis: Basis, u_range: (i32, i32)) -> Result<Self> {
        let syms: Vec<Symbol> = unknowns.iter().map(|n| Symbol::param(n.clone())).collect();
        let set: BTreeSet<&Symbol> = syms.iter().collect();
        let columns: Vec<Expr> = syms.iter().map(|s| residual.diff(s)).collect();
        let mut rebuilt = Expr::zero();
        for (s, c) in syms.iter().zip(&columns) {
            if c.symbols().iter().any(|x| set.contains(x)) {
                return Err(Error::Input(format!("residual is not linear in `{s}`")));
            }
            rebuilt += &(c * &Expr::sym(s.clone()));
        }
        if rebuilt != *residual {
            return Err(Error::Input("residual is not homogeneous in the unknowns".into()));
        }
        DeterminingSystem::from_columns(unknowns.to_vec(), &columns, basis, u_range)
    }

    /// `sum_rows provenance * (sum_j coeff_j * unknown_j)`.
    pub fn reconstruct(&self) -> Expr {
        let mut out = Expr::zero();
        for (prov, row) in &self.rows {
            let form: Expr = row.iter().map(|(j, q)| q * &Expr::param(&self.unknowns[*j])).sum();
            out += &(&prov.monomial(&self.basis) * &form);
        }
        out
    }

    /// Rows with exact normalization applied and duplicates removed.
    pub fn deduplicated_rows(&self) -> Vec<Row> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (_, row) in &self.rows {
            let keys: Vec<usize> = row.keys().copied().collect();
            let mut vals: Vec<Expr> = row.values().cloned().collect();
            linalg::normalize_vector(&mut vals);
            let key: Vec<(usize, String)> = keys.iter().copied().zip(vals.iter().map(Expr::to_string)).collect();
            if seen.insert(key) {
                out.push(keys.into_iter().zip(vals).collect());
            }
        }
        out
    }

    pub fn dump_rows(&self) -> Vec<RowDump> {
        self.rows
            .iter()
            .map(|(prov, row)| RowDump {
                provenance: prov.describe(&self.basis),
                coefficients: row.iter().map(|(j, q)| (self.unknowns[*j].clone(), q.to_string())).collect(),
            })
            .collect()
    }
}

impl fmt::Display for DeterminingSystem {
    /// One equation per line: provenance, then the nonzero coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.dump_rows() {
            write!(f, "{} |", row.provenance)?;
            for (name, q) in row.coefficients {
                write!(f, " {name}: {q};")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::noether::{noether_action, ExactBasis, free_lagrangian};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn collects_free_oscillator_action() {
        let b = ExactBasis::new();
        let r = noether_action(&b.xi[3], &b.eta[3], &free_lagrangian());
        let c = collect_jet(&r);
        assert_eq!(c.len(), 2);
        assert_eq!(c[&Monomial::one()], p("u*sin(phi)"));
        let up = Monomial::from_parts(vec![(Symbol::up(), 1)], None);
        assert_eq!(c[&up], p("-cos(phi)"));
        assert!(collect_jet(&Expr::zero()).is_empty());
    }

    #[test]
    fn expands_secular_terms() {
        let basis = Basis::default();
        let e = expand_in_basis(&p("a0*phi*cos(2*phi)*u"), &basis, (-4, 6)).unwrap();
        let idx = basis.index_of(1, Some(crate::expr::Trig::cos(2))).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[&(1, idx)], p("a0"));
        assert!(expand_in_basis(&Expr::zero(), &basis, (-4, 6)).unwrap().is_empty());
    }

    #[test]
    fn reports_overflow() {
        let basis = Basis::default();
        let cube = p("cos(phi)^3*u");
        match expand_in_basis(&cube, &basis, (-4, 6)) {
            Err(Error::BasisOverflow { term, .. }) => assert_eq!(term, "(1/4)*u*cos(3*phi)"),
            other => panic!("{other:?}"),
        }
        assert!(expand_in_basis(&cube, &Basis::new(1, 3), (-4, 6)).is_ok());
        assert!(matches!(expand_in_basis(&p("u^7"), &basis, (-4, 6)), Err(Error::BasisOverflow { .. })));
        assert!(matches!(expand_in_basis(&p("phi^2"), &basis, (-4, 6)), Err(Error::BasisOverflow { .. })));
    }

    #[test]
    fn system_reconstructs_residual() {
        let r = p("x1*u*sin(phi) - x1*up*cos(phi) + a0*x2*up*u^2*phi + 3*x2*u^-3 - x3*phi*sin(2*phi)");
        let names = vec!["x1".to_string(), "x2".into(), "x3".into()];
        let s = DeterminingSystem::from_residual(&r, &names, Basis::default(), (-4, 6)).unwrap();
        assert_eq!(s.reconstruct(), r);
        assert_eq!(s.rows.len(), 5);
        let provs: BTreeSet<_> = s.rows.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(provs.len(), s.rows.len());
        let text = s.to_string();
        assert_eq!(text.lines().count(), 5);
        assert!(text.contains("x2: a0;"), "{text}");
    }

    #[test]
    fn rejects_nonlinear_residuals() {
        let names = vec!["x1".to_string()];
        assert!(DeterminingSystem::from_residual(&p("x1^2*u"), &names, Basis::default(), (-4, 6)).is_err());
        assert!(DeterminingSystem::from_residual(&p("x1*u + 1"), &names, Basis::default(), (-4, 6)).is_err());
    }

    #[test]
    fn duplicates_are_removed_when_solving() {
        let r = p("x1*u + x2*u - 2*x1*u^2 - 2*x2*u^2 + x1*sin(phi)");
        let names = vec!["x1".to_string(), "x2".into()];
        let s = DeterminingSystem::from_residual(&r, &names, Basis::default(), (-4, 6)).unwrap();
        assert_eq!(s.rows.len(), 3);
        assert_eq!(s.deduplicated_rows().len(), 2);
    }
}
