//! Exact symbolic expressions over the jet variables `phi, u, up, upp, ...`,
//! named parameters and abstract point functions `f(phi, u)`.
//!
//! An [`Expr`] is always stored in canonical form: a finite sum of terms
//! `q * m * t` where `q` is a nonzero rational, `m` a product of integer powers
//! of symbols (sorted, no repeated symbol) and `t` at most one trigonometric
//! factor `sin(k*phi)` or `cos(k*phi)` with `k >= 1`. Products of trigonometric
//! factors are folded back into this multiple-angle span on construction, so two
//! expressions are mathematically equal (as trig-polynomials in `phi` with
//! independent jet symbols) exactly when they are structurally equal.

mod basis;
mod calculus;
mod eval;
mod node;
mod parse;
mod print;

pub use basis::{Basis, BasisElem};
pub use eval::CompiledExpr;
pub use node::{simplify, Node};
pub use parse::parse;
pub use print::print_canonical;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary precision rational used for every coefficient.
pub type Rational = BigRational;

/// Highest jet order that has a printable name (`u` followed by up to this many `p`).
pub const MAX_JET_ORDER: u8 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("trigonometric argument at {pos} must normalize to an integer multiple of phi")]
    TrigArgument { pos: usize },
    #[error("exponent at {pos} is not an integer")]
    NonIntegerExponent { pos: usize },
    #[error("negative power or division of a non-monomial expression `{0}`")]
    NotInvertible(String),
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// Named constant such as `a0`, `ell` or an ansatz unknown.
    Param(String),
    /// Abstract function of `(phi, u)` with the given partial derivative orders.
    Func { name: String, d_phi: u8, d_u: u8 },
    /// The independent variable.
    Phi,
    /// `u` differentiated `n` times with respect to `phi`.
    Jet(u8),
}

impl Symbol {
    pub fn param(name: impl Into<String>) -> Self {
        Symbol::Param(name.into())
    }

    pub fn func(name: impl Into<String>) -> Self {
        Symbol::Func { name: name.into(), d_phi: 0, d_u: 0 }
    }

    pub fn u() -> Self {
        Symbol::Jet(0)
    }

    pub fn up() -> Self {
        Symbol::Jet(1)
    }

    pub fn upp() -> Self {
        Symbol::Jet(2)
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Symbol::Jet(_))
    }

    /// Resolves a bare identifier to the reserved symbol it names, if any.
    pub fn reserved(name: &str) -> Option<Symbol> {
        if name == "phi" {
            return Some(Symbol::Phi);
        }
        let rest = name.strip_prefix('u')?;
        if rest.len() <= MAX_JET_ORDER as usize && rest.chars().all(|c| c == 'p') {
            Some(Symbol::Jet(rest.len() as u8))
        } else {
            None
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Param(name) => f.write_str(name),
            Symbol::Phi => f.write_str("phi"),
            Symbol::Jet(n) => {
                f.write_str("u")?;
                for _ in 0..*n {
                    f.write_str("p")?;
                }
                Ok(())
            }
            Symbol::Func { name, d_phi, d_u } => {
                write!(f, "{name}[")?;
                let mut first = true;
                for v in std::iter::repeat("phi").take(*d_phi as usize).chain(std::iter::repeat("u").take(*d_u as usize)) {
                    if !first {
                        f.write_str(",")?;
                    }
                    first = false;
                    f.write_str(v)?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrigKind {
    Sin,
    Cos,
}

/// `sin(m*phi)` or `cos(m*phi)` with `m >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trig {
    pub kind: TrigKind,
    pub m: u32,
}

impl Trig {
    pub fn sin(m: u32) -> Self {
        Trig { kind: TrigKind::Sin, m }
    }

    pub fn cos(m: u32) -> Self {
        Trig { kind: TrigKind::Cos, m }
    }
}

/// Folds `kind(m*phi)` for any integer `m` into the canonical span.
/// Returns the sign and the surviving trig factor, or `None` when it vanishes.
fn normalize_trig(kind: TrigKind, m: i64) -> Option<(i32, Option<Trig>)> {
    match (kind, m.cmp(&0)) {
        (TrigKind::Sin, Ordering::Equal) => None,
        (TrigKind::Cos, Ordering::Equal) => Some((1, None)),
        (TrigKind::Sin, Ordering::Less) => Some((-1, Some(Trig::sin(m.unsigned_abs() as u32)))),
        (TrigKind::Cos, Ordering::Less) => Some((1, Some(Trig::cos(m.unsigned_abs() as u32)))),
        (_, Ordering::Greater) => Some((1, Some(Trig { kind, m: m as u32 }))),
    }
}

/// Product-to-sum expansion of two trig factors: list of (coefficient, trig).
fn trig_product(a: Trig, b: Trig) -> Vec<(Rational, Option<Trig>)> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let (ma, mb) = (a.m as i64, b.m as i64);
    let parts: [(i32, TrigKind, i64); 2] = match (a.kind, b.kind) {
        (TrigKind::Sin, TrigKind::Sin) => [(1, TrigKind::Cos, ma - mb), (-1, TrigKind::Cos, ma + mb)],
        (TrigKind::Cos, TrigKind::Cos) => [(1, TrigKind::Cos, ma - mb), (1, TrigKind::Cos, ma + mb)],
        (TrigKind::Sin, TrigKind::Cos) => [(1, TrigKind::Sin, ma + mb), (1, TrigKind::Sin, ma - mb)],
        (TrigKind::Cos, TrigKind::Sin) => [(1, TrigKind::Sin, ma + mb), (-1, TrigKind::Sin, ma - mb)],
    };
    parts
        .iter()
        .filter_map(|&(sign, kind, m)| {
            normalize_trig(kind, m).map(|(s, t)| (&half * Rational::from_integer(BigInt::from(sign * s)), t))
        })
        .collect()
}

/// Product of symbol powers times at most one trig factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Symbol, i32)>,
    trig: Option<Trig>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_parts(mut factors: Vec<(Symbol, i32)>, trig: Option<Trig>) -> Self {
        factors.retain(|(_, e)| *e != 0);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Symbol, i32)> = Vec::with_capacity(factors.len());
        for (s, e) in factors {
            match merged.last_mut() {
                Some((last, le)) if *last == s => *le += e,
                _ => merged.push((s, e)),
            }
        }
        merged.retain(|(_, e)| *e != 0);
        Monomial { factors: merged, trig }
    }

    pub fn factors(&self) -> &[(Symbol, i32)] {
        &self.factors
    }

    pub fn trig(&self) -> Option<Trig> {
        self.trig
    }

    pub fn power(&self, s: &Symbol) -> i32 {
        self.factors
            .binary_search_by(|(x, _)| x.cmp(s))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.trig.is_none()
    }

    /// Product of the symbol parts; trig factors are ignored.
    fn mul_symbols(&self, other: &Monomial) -> Vec<(Symbol, i32)> {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            match self.factors[i].0.cmp(&other.factors[j].0) {
                Ordering::Less => {
                    out.push(self.factors[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.factors[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.factors[i].1 + other.factors[j].1;
                    if e != 0 {
                        out.push((self.factors[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        out
    }

    fn with_trig(&self, trig: Option<Trig>) -> Monomial {
        Monomial { factors: self.factors.clone(), trig }
    }

    /// Same monomial with the factor `s` removed.
    pub fn without(&self, s: &Symbol) -> Monomial {
        Monomial {
            factors: self.factors.iter().filter(|(x, _)| x != s).cloned().collect(),
            trig: self.trig,
        }
    }

    /// Same monomial keeping only factors accepted by `keep`, and the trig factor if `keep_trig`.
    pub fn filtered(&self, keep: impl Fn(&Symbol) -> bool, keep_trig: bool) -> Monomial {
        Monomial {
            factors: self.factors.iter().filter(|(s, _)| keep(s)).cloned().collect(),
            trig: if keep_trig { self.trig } else { None },
        }
    }

    fn jet_key(&self) -> [i32; MAX_JET_ORDER as usize + 1] {
        let mut key = [0; MAX_JET_ORDER as usize + 1];
        for (s, e) in &self.factors {
            if let Symbol::Jet(n) = s {
                key[*n as usize] = *e;
            }
        }
        key
    }
}

impl Ord for Monomial {
    /// Term order used for printing: higher jet orders and powers first, then
    /// powers of `phi`, then parameter/function factors, then the trig factor.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.jet_key(), other.jet_key());
        for n in (0..a.len()).rev() {
            if a[n] != b[n] {
                return b[n].cmp(&a[n]);
            }
        }
        let (pa, pb) = (self.power(&Symbol::Phi), other.power(&Symbol::Phi));
        if pa != pb {
            return pb.cmp(&pa);
        }
        let rest = |m: &Monomial| -> Vec<(Symbol, i32)> {
            m.factors.iter().filter(|(s, _)| !matches!(s, Symbol::Phi | Symbol::Jet(_))).cloned().collect()
        };
        let (ra, rb) = (rest(self), rest(other));
        for (x, y) in ra.iter().zip(rb.iter()) {
            match x.0.cmp(&y.0) {
                Ordering::Equal => {
                    if x.1 != y.1 {
                        return y.1.cmp(&x.1);
                    }
                }
                // a factor present only in one side sorts that side first
                ord => return ord,
            }
        }
        match rb.len().cmp(&ra.len()) {
            Ordering::Equal => self.trig.cmp(&other.trig),
            ord => ord,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical trig-polynomial expression. See the module docs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Expr::constant(rat(n, d))
    }

    pub fn constant(q: Rational) -> Self {
        Expr::term(q, Monomial::one())
    }

    pub fn term(q: Rational, m: Monomial) -> Self {
        let mut e = Expr::zero();
        e.add_term(m, q);
        e
    }

    pub fn sym(s: Symbol) -> Self {
        Expr::term(Rational::one(), Monomial::from_parts(vec![(s, 1)], None))
    }

    pub fn phi() -> Self {
        Expr::sym(Symbol::Phi)
    }

    pub fn u() -> Self {
        Expr::sym(Symbol::Jet(0))
    }

    pub fn up() -> Self {
        Expr::sym(Symbol::Jet(1))
    }

    pub fn upp() -> Self {
        Expr::sym(Symbol::Jet(2))
    }

    pub fn jet(n: u8) -> Self {
        Expr::sym(Symbol::Jet(n))
    }

    pub fn param(name: &str) -> Self {
        Expr::sym(Symbol::param(name))
    }

    pub fn func(name: &str) -> Self {
        Expr::sym(Symbol::func(name))
    }

    /// `sin(m*phi)` for any integer `m`.
    pub fn sin(m: i64) -> Self {
        Expr::trig(TrigKind::Sin, m)
    }

    /// `cos(m*phi)` for any integer `m`.
    pub fn cos(m: i64) -> Self {
        Expr::trig(TrigKind::Cos, m)
    }

    pub fn trig(kind: TrigKind, m: i64) -> Self {
        match normalize_trig(kind, m) {
            None => Expr::zero(),
            Some((sign, t)) => Expr::term(Rational::from_integer(BigInt::from(sign)), Monomial { factors: vec![], trig: t }),
        }
    }

    /// `kind(arg)` where `arg` must be an integer multiple of `phi`.
    pub fn trig_of(kind: TrigKind, arg: &Expr) -> Option<Expr> {
        if arg.is_zero() {
            return Some(Expr::trig(kind, 0));
        }
        let (mono, q) = arg.single_term()?;
        if mono.trig.is_some() || mono.factors != [(Symbol::Phi, 1)] || !q.is_integer() {
            return None;
        }
        let m: i64 = num_traits::ToPrimitive::to_i64(q.numer())?;
        Some(Expr::trig(kind, m))
    }

    pub fn add_term(&mut self, m: Monomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(q);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut e = Expr::zero();
        for (m, q) in terms {
            e.add_term(m, q);
        }
        e
    }

    /// The rational value if the expression is a constant (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, q) = self.terms.iter().next().unwrap();
                m.is_one().then(|| q.clone())
            }
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn scale(&self, q: &Rational) -> Expr {
        if q.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn pow(&self, n: i64) -> Result<Expr, ExprError> {
        if n < 0 {
            let inv = self.inverse()?;
            return Ok(inv.pow(-n).expect("nonnegative power"));
        }
        let mut base = self.clone();
        let mut acc = Expr::one();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Inverse of a single trig-free term.
    pub fn inverse(&self) -> Result<Expr, ExprError> {
        match self.single_term() {
            Some((m, q)) if m.trig.is_none() => {
                let factors = m.factors.iter().map(|(s, e)| (s.clone(), -e)).collect();
                Ok(Expr::term(q.recip(), Monomial { factors, trig: None }))
            }
            _ => Err(ExprError::NotInvertible(self.to_string())),
        }
    }

    pub fn div(&self, other: &Expr) -> Result<Expr, ExprError> {
        Ok(self * &other.inverse()?)
    }

    pub fn mul_monomial(&self, m: &Monomial, q: &Rational) -> Expr {
        let mut out = Expr::zero();
        for (tm, tq) in &self.terms {
            for (mono, c) in mul_monomials(tm, m) {
                out.add_term(mono, c * tq * q);
            }
        }
        out
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.factors.iter().map(|(s, _)| s.clone())).collect()
    }

    pub fn has_trig(&self) -> bool {
        self.terms.keys().any(|m| m.trig.is_some())
    }

    pub fn depends_on(&self, s: &Symbol) -> bool {
        if *s == Symbol::Phi && self.has_trig() {
            return true;
        }
        self.terms.keys().any(|m| m.power(s) != 0)
    }

    /// Largest `n` such that `Jet(n)` occurs, if any jet occurs.
    pub fn max_jet(&self) -> Option<u8> {
        self.symbols().into_iter().filter_map(|s| if let Symbol::Jet(n) = s { Some(n) } else { None }).max()
    }

    /// True when every symbol is a parameter (no phi, jets, functions or trig).
    pub fn is_parametric_constant(&self) -> bool {
        !self.has_trig() && self.terms.keys().all(|m| m.factors.iter().all(|(s, _)| matches!(s, Symbol::Param(_))))
    }

    /// Coefficient of `s^power` treating `s` as an independent atom.
    pub fn coefficient(&self, s: &Symbol, power: i32) -> Expr {
        let mut out = Expr::zero();
        for (m, q) in &self.terms {
            if m.power(s) == power {
                out.add_term(m.without(s), q.clone());
            }
        }
        out
    }
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> Vec<(Monomial, Rational)> {
    let factors = a.mul_symbols(b);
    match (a.trig, b.trig) {
        (None, t) | (t, None) => vec![(Monomial { factors, trig: t }, Rational::one())],
        (Some(x), Some(y)) => {
            let base = Monomial { factors, trig: None };
            trig_product(x, y).into_iter().map(|(c, t)| (base.with_trig(t), c)).collect()
        }
    }
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(mut self, rhs: Expr) -> Expr {
        self += &rhs;
        self
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, q) in &rhs.terms {
            self.add_term(m.clone(), q.clone());
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, q) in &rhs.terms {
            self.add_term(m.clone(), -q.clone());
        }
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: Expr) -> Expr {
        self -= &rhs;
        self
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, qa) in &self.terms {
            for (mb, qb) in &rhs.terms {
                let q = qa * qb;
                for (m, c) in mul_monomials(ma, mb) {
                    out.add_term(m, c * &q);
                }
            }
        }
        out
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { terms: self.terms.iter().map(|(m, q)| (m.clone(), -q.clone())).collect() }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Expr::zero();
        for e in iter {
            acc += &e;
        }
        acc
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Self {
        Expr::constant(q)
    }
}
