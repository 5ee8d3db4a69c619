//! Perturbed Lagrangians, the exact Noether algebra of the free oscillator,
//! prolongation and the order-by-order approximate Noether residual.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, Rational, Symbol};

/// `L0 = (-up^2 + u^2) / 2`.
pub fn free_lagrangian() -> Expr {
    parse("-(1/2)*up^2 + (1/2)*u^2").expect("literal")
}

/// `L = L0 + eps*G1 + eps^2*G2 + eps^3*G3` with `Gi` built from `u`, `up`,
/// `upp` and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedLagrangian {
    pub label: String,
    g: [Expr; 3],
    pub parameters: Vec<(String, Option<Rational>)>,
}

impl PerturbedLagrangian {
    pub fn new(label: &str, g: [Expr; 3], parameters: Vec<(String, Option<Rational>)>) -> Result<Self> {
        for (i, gi) in g.iter().enumerate() {
            if gi.has_trig() {
                return Err(Error::Input(format!("G{} depends on phi", i + 1)));
            }
            for (m, _) in gi.terms() {
                for (s, e) in m.factors() {
                    match s {
                        Symbol::Jet(0) | Symbol::Param(_) => {}
                        Symbol::Jet(1) | Symbol::Jet(2) if *e > 0 => {}
                        Symbol::Jet(n) if *n <= 2 => {
                            return Err(Error::Input(format!("G{}: negative power of {s}", i + 1)));
                        }
                        _ => return Err(Error::Input(format!("G{}: symbol `{s}` is not allowed", i + 1))),
                    }
                }
            }
            for s in gi.symbols() {
                if let Symbol::Param(name) = &s {
                    if !parameters.iter().any(|(p, _)| p == name) {
                        return Err(Error::Input(format!("G{}: parameter `{name}` is not declared", i + 1)));
                    }
                }
            }
        }
        Ok(PerturbedLagrangian { label: label.to_string(), g, parameters })
    }

    pub fn unperturbed() -> Self {
        PerturbedLagrangian { label: "unperturbed".into(), g: Default::default(), parameters: vec![] }
    }

    /// `G_i` with `G_0 = L0`; zero beyond order three.
    pub fn g(&self, i: usize) -> Expr {
        match i {
            0 => free_lagrangian(),
            1..=3 => self.g[i - 1].clone(),
            _ => Expr::zero(),
        }
    }

    /// Highest order with a nonzero perturbation, 0 if none.
    pub fn perturbation_order(&self) -> usize {
        (1..=3).rev().find(|&i| !self.g[i - 1].is_zero()).unwrap_or(0)
    }

    /// Whether some `G_i` with `i <= order` depends on `upp`.
    pub fn is_higher_order(&self, order: usize) -> bool {
        (1..=order.min(3)).any(|i| self.g[i - 1].depends_on(&Symbol::upp()))
    }

    pub fn parameter_defaults(&self) -> BTreeMap<Symbol, f64> {
        use num_traits::ToPrimitive;
        self.parameters
            .iter()
            .filter_map(|(n, v)| v.as_ref().map(|q| (Symbol::param(n.clone()), q.to_f64().unwrap_or(f64::NAN))))
            .collect()
    }

    /// Same Lagrangian with some parameters replaced by rational values.
    pub fn specialize(&self, values: &BTreeMap<String, Rational>) -> Result<Self> {
        let bindings: BTreeMap<Symbol, Expr> =
            values.iter().map(|(n, q)| (Symbol::param(n.clone()), Expr::constant(q.clone()))).collect();
        let mut g = self.g.clone();
        for gi in &mut g {
            *gi = gi.substitute(&bindings)?;
        }
        let parameters = self.parameters.iter().filter(|(n, _)| !values.contains_key(n)).cloned().collect();
        Ok(PerturbedLagrangian { label: self.label.clone(), g, parameters })
    }
}

/// The Euler-Lagrange expression `E = sum eps^i E_i`, normalized so that
/// `E_0 = upp + u`.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerLagrange {
    pub parts: Vec<Expr>,
    /// Set when some perturbation depends on `upp`; then `E` is of order four.
    pub higher_order: bool,
}

fn euler_operator(g: &Expr) -> Expr {
    let mut e = g.diff(&Symbol::u());
    e -= &g.diff(&Symbol::up()).total_derivative();
    let gpp = g.diff(&Symbol::upp());
    if !gpp.is_zero() {
        e += &gpp.total_derivative().total_derivative();
    }
    e
}

pub fn euler_lagrange(l: &PerturbedLagrangian, order: usize) -> EulerLagrange {
    let parts = (0..=order).map(|i| euler_operator(&l.g(i))).collect();
    EulerLagrange { parts, higher_order: l.is_higher_order(order) }
}

/// Truncated power series in `eps` with expression coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series(pub Vec<Expr>);

impl Series {
    pub fn order(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize) -> Expr {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn mul(&self, other: &Series, order: usize) -> Series {
        let mut out = vec![Expr::zero(); order + 1];
        for (i, a) in self.0.iter().enumerate().take(order + 1) {
            for (j, b) in other.0.iter().enumerate().take(order + 1 - i) {
                out[i + j] += &(a * b);
            }
        }
        Series(out)
    }

    /// `e` with `s` replaced by this series, truncated at `order`.
    pub fn substitute_into(&self, e: &Expr, s: &Symbol, order: usize) -> Result<Series> {
        let mut powers: BTreeMap<i32, Expr> = BTreeMap::new();
        for (m, q) in e.terms() {
            *powers.entry(m.power(s)).or_default() += &Expr::term(q.clone(), m.without(s));
        }
        let mut out = Series(vec![Expr::zero(); order + 1]);
        for (n, c) in powers {
            if n < 0 {
                let head = self.get(0);
                if self.0.iter().skip(1).any(|x| !x.is_zero()) {
                    return Err(Error::Input(format!("cannot expand a negative power of {s} in eps")));
                }
                out.0[0] += &(&c * &head.pow(n as i64)?);
                continue;
            }
            let mut p = Series(vec![Expr::one()]);
            for _ in 0..n {
                p = p.mul(self, order);
            }
            for (k, pk) in p.0.iter().enumerate().take(order + 1) {
                out.0[k] += &(&c * pk);
            }
        }
        Ok(out)
    }
}

impl EulerLagrange {
    /// Solved form `upp = F_0 + eps F_1 + ...` up to `order`.
    pub fn solved(&self, order: usize) -> Result<Series> {
        if self.higher_order {
            return Err(Error::HigherOrderEquation);
        }
        let upp = Symbol::upp();
        let mut f = Series(vec![-Expr::u()]);
        for j in 1..=order {
            let mut fj = Expr::zero();
            for i in 1..=j.min(self.parts.len() - 1) {
                let expanded = f.substitute_into(&self.parts[i], &upp, j - i)?;
                fj -= &expanded.get(j - i);
            }
            if fj.depends_on(&upp) {
                return Err(Error::HigherOrderEquation);
            }
            f.0.push(fj);
        }
        Ok(f)
    }
}

/// First and second prolongation coefficients of `xi d_phi + eta d_u`.
pub fn prolong(xi: &Expr, eta: &Expr, depth: u8) -> (Expr, Option<Expr>) {
    let dxi = xi.total_derivative();
    let eta1 = &eta.total_derivative() - &(&Expr::up() * &dxi);
    let eta2 = (depth >= 2).then(|| &eta1.total_derivative() - &(&Expr::upp() * &dxi));
    (eta1, eta2)
}

/// `X^[2] g + (D xi) g` for a point generator `xi d_phi + eta d_u`.
pub fn noether_action(xi: &Expr, eta: &Expr, g: &Expr) -> Expr {
    if g.is_zero() || (xi.is_zero() && eta.is_zero()) {
        return Expr::zero();
    }
    let (eta1, eta2) = prolong(xi, eta, 2);
    let mut out = xi * &g.diff(&Symbol::Phi);
    out += &(eta * &g.diff(&Symbol::u()));
    out += &(&eta1 * &g.diff(&Symbol::up()));
    let gpp = g.diff(&Symbol::upp());
    if !gpp.is_zero() {
        out += &(&eta2.expect("depth two") * &gpp);
    }
    out += &(&xi.total_derivative() * g);
    out
}

/// The five Noether point symmetries of the free oscillator with their gauge
/// slices. Index `h - 1` holds `X0^h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactBasis {
    pub xi: [Expr; 5],
    pub eta: [Expr; 5],
    pub gauge: [Expr; 5],
}

impl ExactBasis {
    pub fn new() -> Self {
        let p = |s: &str| parse(s).expect("literal");
        ExactBasis {
            xi: [p("1"), p("sin(2*phi)"), p("cos(2*phi)"), p("0"), p("0")],
            eta: [p("0"), p("u*cos(2*phi)"), p("-u*sin(2*phi)"), p("sin(phi)"), p("cos(phi)")],
            gauge: [p("0"), p("u^2*sin(2*phi)"), p("u^2*cos(2*phi)"), p("-u*cos(phi)"), p("u*sin(phi)")],
        }
    }

    /// Generator and gauge for the combination `sum c_h X0^h` plus constant `c6`.
    pub fn combine(&self, c: &[Expr; 5], c6: &Expr) -> (Expr, Expr, Expr) {
        let mut xi = Expr::zero();
        let mut eta = Expr::zero();
        let mut a = c6.clone();
        for h in 0..5 {
            xi += &(&c[h] * &self.xi[h]);
            eta += &(&c[h] * &self.eta[h]);
            a += &(&c[h] * &self.gauge[h]);
        }
        (xi, eta, a)
    }
}

impl Default for ExactBasis {
    fn default() -> Self {
        ExactBasis::new()
    }
}

/// `X = X0 + eps X1 + ...` with `X0 = sum c_h X0^h`; `corrections[k-1]`
/// holds `(xi_k, eta_k)` as functions of `(phi, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxGenerator {
    pub order0: [Expr; 5],
    pub corrections: Vec<(Expr, Expr)>,
}

impl ApproxGenerator {
    pub fn exact(h: usize) -> Self {
        let mut order0: [Expr; 5] = Default::default();
        order0[h - 1] = Expr::one();
        ApproxGenerator { order0, corrections: vec![] }
    }

    pub fn max_order(&self) -> usize {
        self.corrections.len()
    }

    /// `(xi_k, eta_k)`, zero beyond the stored orders.
    pub fn part(&self, k: usize) -> (Expr, Expr) {
        if k == 0 {
            let (xi, eta, _) = ExactBasis::new().combine(&self.order0, &Expr::zero());
            return (xi, eta);
        }
        self.corrections.get(k - 1).cloned().unwrap_or_default()
    }
}

/// `A = A0 + eps A1 + ...` as functions of `(phi, u)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GaugeTerm {
    pub parts: Vec<Expr>,
}

impl GaugeTerm {
    /// `A0` for `sum c_h X0^h` with gauge constant `c6`.
    pub fn exact(c: &[Expr; 5], c6: &Expr) -> Self {
        GaugeTerm { parts: vec![ExactBasis::new().combine(c, c6).2] }
    }

    pub fn part(&self, k: usize) -> Expr {
        self.parts.get(k).cloned().unwrap_or_default()
    }
}

/// Coefficient of `eps^k` in `X^[2] L + (D xi) L - D A`.
pub fn residual_order_k(l: &PerturbedLagrangian, x: &ApproxGenerator, a: &GaugeTerm, k: usize) -> Result<Expr> {
    if k > 0 && x.max_order() < k {
        return Err(Error::MissingOrder(x.max_order() + 1));
    }
    if a.parts.len() <= k {
        return Err(Error::MissingOrder(a.parts.len()));
    }
    let mut r = -a.part(k).total_derivative();
    for j in 0..=k {
        let (xi, eta) = x.part(j);
        r += &noether_action(&xi, &eta, &l.g(k - j));
    }
    Ok(r)
}

/// The order-`k` residual for a fully symbolic generator: order zero is
/// `sum c_h X0^h` with gauge constant `c6`, and every correction `xi_j`,
/// `eta_j`, `A_j` is an abstract function of `(phi, u)`.
pub fn generic_residual(l: &PerturbedLagrangian, k: usize) -> Expr {
    let c: [Expr; 5] = std::array::from_fn(|h| Expr::param(&format!("c{}", h + 1)));
    let x = ApproxGenerator {
        order0: c.clone(),
        corrections: (1..=k).map(|j| (Expr::func(&format!("xi{j}")), Expr::func(&format!("eta{j}")))).collect(),
    };
    let mut a = GaugeTerm::exact(&c, &Expr::param("c6"));
    a.parts.extend((1..=k).map(|j| Expr::func(&format!("gauge{j}"))));
    residual_order_k(l, &x, &a, k).expect("all orders present")
}
