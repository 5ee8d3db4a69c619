//! Case files: a flat `[section]` / `key = value` format describing a
//! perturbed Lagrangian, its parameters and solver and verification settings.
//!
//! ```text
//! [case]
//! label = orbital
//! [lagrangian]
//! G1 = -(1/2)*ell^-2*u - (1/2)*u^3
//! [parameters]
//! ell = 2
//! [solver]
//! order = 2
//! [verify]
//! order = 1
//! eps = 1/1000, 1/2000
//! phi_end = 20*pi
//! ```

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse, Basis, Expr, Rational, Symbol};
use crate::noether::PerturbedLagrangian;
use crate::solve::SolverConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub order: usize,
    pub eps: Vec<f64>,
    pub u0: f64,
    pub up0: f64,
    pub phi_end: f64,
    pub h: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { order: 1, eps: vec![1e-3, 5e-4], u0: 1.0, up0: 0.0, phi_end: 20.0 * std::f64::consts::PI, h: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseFile {
    pub label: String,
    pub description: String,
    pub g: [Expr; 3],
    pub parameters: Vec<(String, Option<Rational>)>,
    pub order: Option<usize>,
    pub solver: SolverConfig,
    pub verify: VerifyConfig,
}

fn input(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("line {line}: {msg}"))
}

/// A float literal, or a constant expression in `pi` such as `20*pi`.
fn number(line: usize, text: &str) -> Result<f64> {
    if let Ok(x) = text.trim().parse::<f64>() {
        return Ok(x);
    }
    let e = parse(text).map_err(|e| input(line, e))?;
    let env: HashMap<Symbol, f64> = [(Symbol::param("pi"), std::f64::consts::PI)].into_iter().collect();
    e.eval(&env).map_err(|e| input(line, e))
}

fn integer<T: std::str::FromStr>(line: usize, key: &str, text: &str) -> Result<T> {
    text.trim().parse().map_err(|_| input(line, format!("`{key}` expects an integer, got `{text}`")))
}

fn rational(line: usize, text: &str) -> Result<Rational> {
    parse(text)
        .map_err(|e| input(line, e))?
        .as_constant()
        .ok_or_else(|| input(line, format!("`{text}` is not a rational constant")))
}

impl CaseFile {
    pub fn parse(text: &str) -> Result<CaseFile> {
        let mut label = None;
        let mut description = String::new();
        let mut g: [Option<Expr>; 3] = Default::default();
        let mut parameters: Vec<(String, Option<Rational>)> = Vec::new();
        let mut order = None;
        let mut solver = SolverConfig::default();
        let mut verify = VerifyConfig::default();
        let mut section = String::new();

        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                if !["case", "lagrangian", "parameters", "solver", "verify"].contains(&section.as_str()) {
                    return Err(input(line, format!("unknown section `[{section}]`")));
                }
                continue;
            }
            let (key, value) = match content.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None if section == "parameters" => (content, ""),
                None => return Err(input(line, "expected `key = value`")),
            };
            match (section.as_str(), key) {
                ("", _) => return Err(input(line, "entry before the first section")),
                ("case", "label") => label = Some(value.to_string()),
                ("case", "description") => description = value.to_string(),
                ("lagrangian", "G1" | "G2" | "G3") => {
                    let i = key[1..].parse::<usize>().expect("digit") - 1;
                    if g[i].is_some() {
                        return Err(input(line, format!("{key} given twice")));
                    }
                    g[i] = Some(parse(value).map_err(|e| input(line, format!("{key}: {e}")))?);
                }
                ("parameters", name) => {
                    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || Symbol::reserved(name).is_some() {
                        return Err(input(line, format!("invalid parameter name `{name}`")));
                    }
                    if parameters.iter().any(|(p, _)| p == name) {
                        return Err(input(line, format!("parameter `{name}` declared twice")));
                    }
                    let default = if value.is_empty() { None } else { Some(rational(line, value)?) };
                    parameters.push((name.to_string(), default));
                }
                ("solver", "order") => order = Some(integer(line, key, value)?),
                ("solver", "basis_p") => solver.basis = Basis::new(integer(line, key, value)?, solver.basis.m_max),
                ("solver", "basis_m") => solver.basis = Basis::new(solver.basis.p_max, integer(line, key, value)?),
                ("solver", "u_min") => solver.u_range.0 = integer(line, key, value)?,
                ("solver", "u_max") => solver.u_range.1 = integer(line, key, value)?,
                ("solver", "deg_xi") => solver.deg_xi = integer(line, key, value)?,
                ("solver", "deg_eta") => solver.deg_eta = integer(line, key, value)?,
                ("solver", "deg_gauge") => solver.deg_gauge = integer(line, key, value)?,
                ("verify", "order") => verify.order = integer(line, key, value)?,
                ("verify", "eps") => {
                    verify.eps = value.split(',').map(|s| number(line, s)).collect::<Result<_>>()?;
                    if verify.eps.is_empty() {
                        return Err(input(line, "empty eps list"));
                    }
                }
                ("verify", "u0") => verify.u0 = number(line, value)?,
                ("verify", "up0") => verify.up0 = number(line, value)?,
                ("verify", "phi_end") => verify.phi_end = number(line, value)?,
                ("verify", "h") => verify.h = number(line, value)?,
                (s, k) => return Err(input(line, format!("unknown key `{k}` in [{s}]"))),
            }
        }

        let label = label.ok_or_else(|| Error::Input("missing `label` in [case]".into()))?;
        let highest = g.iter().rposition(Option::is_some).ok_or_else(|| Error::Input("no G1..G3 given".into()))?;
        if let Some(i) = (0..highest).find(|&i| g[i].is_none()) {
            return Err(Error::Input(format!("G{} must be given (possibly as 0) because G{} is", i + 1, highest + 1)));
        }
        let g = g.map(Option::unwrap_or_default);
        let case = CaseFile { label, description, g, parameters, order, solver, verify };
        case.lagrangian()?;
        Ok(case)
    }

    pub fn lagrangian(&self) -> Result<PerturbedLagrangian> {
        PerturbedLagrangian::new(&self.label, self.g.clone(), self.parameters.clone())
    }

    /// Replaces parameters by exact values; they are no longer declared.
    pub fn specialize(&self, values: &[(String, Rational)]) -> Result<CaseFile> {
        let mut bindings = std::collections::BTreeMap::new();
        for (name, q) in values {
            if !self.parameters.iter().any(|(p, _)| p == name) {
                return Err(Error::Input(format!("unknown parameter `{name}`")));
            }
            bindings.insert(Symbol::param(name.clone()), Expr::constant(q.clone()));
        }
        let mut out = self.clone();
        for g in &mut out.g {
            *g = g.substitute(&bindings)?;
        }
        out.parameters.retain(|(p, _)| !values.iter().any(|(n, _)| n == p));
        Ok(out)
    }

    /// Explicit order if given, otherwise the highest perturbation order.
    pub fn default_order(&self) -> usize {
        self.order.unwrap_or_else(|| (1..=3).rev().find(|&i| !self.g[i - 1].is_zero()).unwrap_or(1))
    }

    /// Numerical parameter values; every parameter needs a default.
    pub fn parameter_values(&self) -> Result<HashMap<Symbol, f64>> {
        use num_traits::ToPrimitive;
        self.parameters
            .iter()
            .map(|(n, v)| match v {
                Some(q) => Ok((Symbol::param(n.clone()), q.to_f64().unwrap_or(f64::NAN))),
                None => Err(Error::Input(format!("parameter `{n}` has no numerical value"))),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let text = "\
# comment
[case]
label = demo
[lagrangian]
G1 = a*u^2   # trailing comment
G2 = 0
G3 = b*up^2
[parameters]
a = 5/4
b
[solver]
basis_m = 3
u_min = -2
[verify]
eps = 1e-3, 1/2000
phi_end = 2*pi
";
        let c = CaseFile::parse(text).unwrap();
        assert_eq!(c.label, "demo");
        assert_eq!(c.g[2], parse("b*up^2").unwrap());
        assert_eq!(c.parameters[0].1, Some(Rational::new(5.into(), 4.into())));
        assert_eq!(c.parameters[1].1, None);
        assert_eq!(c.solver.basis, Basis::new(1, 3));
        assert_eq!(c.solver.u_range, (-2, 6));
        assert_eq!(c.verify.eps, vec![1e-3, 5e-4]);
        assert!((c.verify.phi_end - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(c.default_order(), 3);
        assert!(c.parameter_values().is_err());
    }

    #[test]
    fn rejects_bad_files() {
        let bad = [
            "[case]\nlabel = x\n[lagrangian]\nG1 = c*u\n",
            "[case]\nlabel = x\n[lagrangian]\nG1 = u\nG3 = u\n",
            "[case]\nlabel = x\n[lagrangian]\nG4 = u\n",
            "[case]\nlabel = x\n[lagrangian]\nG1 = u*sin(phi)\n",
            "[case]\nlabel = x\n[nonsense]\n",
            "label = x\n",
            "[case]\n[lagrangian]\nG1 = u\n",
            "[case]\nlabel = x\n[lagrangian]\nG1 = u\n[parameters]\nup = 1\n",
            "[case]\nlabel = x\n[lagrangian]\nG1 = u\n[solver]\norder = two\n",
        ];
        for text in bad {
            assert!(matches!(CaseFile::parse(text), Err(Error::Input(_))), "{text}");
        }
    }
}
