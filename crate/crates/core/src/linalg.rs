//! Exact linear algebra over Laurent polynomials in the named parameters.
//!
//! Entries are [`Expr`] values whose only symbols are parameters. Parameters
//! are generic, so an entry is zero exactly when its canonical form is empty.
//! Elimination works in the fraction field by cross-multiplication and keeps
//! rows free of monomial and rational content.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::expr::{Expr, Monomial, Rational, Symbol};

pub type Row = BTreeMap<usize, Expr>;

fn params_of<'a>(entries: impl Iterator<Item = &'a Expr>) -> Vec<Symbol> {
    let mut set = BTreeSet::new();
    for e in entries {
        set.extend(e.symbols());
    }
    set.into_iter().collect()
}

/// Monomial with the smallest exponent of every parameter over all terms.
fn min_monomial<'a>(entries: impl Iterator<Item = &'a Expr> + Clone) -> Monomial {
    let params = params_of(entries.clone());
    let mut mins: Vec<i32> = vec![i32::MAX; params.len()];
    let mut any = false;
    for e in entries {
        for (m, _) in e.terms() {
            any = true;
            for (i, p) in params.iter().enumerate() {
                mins[i] = mins[i].min(m.power(p));
            }
        }
    }
    if !any {
        return Monomial::one();
    }
    Monomial::from_parts(params.into_iter().zip(mins).collect(), None)
}

fn inverse_monomial(m: &Monomial) -> Monomial {
    Monomial::from_parts(m.factors().iter().map(|(s, e)| (s.clone(), -e)).collect(), None)
}

/// Positive rational `g` such that dividing every coefficient by `g` leaves
/// coprime integers.
fn rational_content<'a>(entries: impl Iterator<Item = &'a Expr>) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for e in entries {
        for (_, q) in e.terms() {
            num = num.gcd(q.numer());
            den = den.lcm(q.denom());
        }
    }
    if num.is_zero() {
        Rational::one()
    } else {
        Rational::new(num, den)
    }
}

fn scale_all<'a>(entries: impl Iterator<Item = &'a mut Expr>, m: &Monomial, q: &Rational) {
    for e in entries {
        *e = e.mul_monomial(m, q);
    }
}

/// Leading term of a polynomial under lexicographic order on `vars`.
fn leading(e: &Expr, vars: &[Symbol]) -> Option<(Monomial, Rational)> {
    e.terms()
        .max_by(|(a, _), (b, _)| {
            let ka: Vec<i32> = vars.iter().map(|v| a.power(v)).collect();
            let kb: Vec<i32> = vars.iter().map(|v| b.power(v)).collect();
            ka.cmp(&kb)
        })
        .map(|(m, q)| (m.clone(), q.clone()))
}

/// Exact quotient `a / b` in the Laurent polynomial ring, if it exists.
pub fn exact_div(a: &Expr, b: &Expr) -> Option<Expr> {
    if b.is_zero() {
        return None;
    }
    if a.is_zero() {
        return Some(Expr::zero());
    }
    if b.len() == 1 {
        return a.div(b).ok();
    }
    let ma = min_monomial(std::iter::once(a));
    let mb = min_monomial(std::iter::once(b));
    let pa = a.mul_monomial(&inverse_monomial(&ma), &Rational::one());
    let pb = b.mul_monomial(&inverse_monomial(&mb), &Rational::one());
    let vars = params_of([&pa, &pb].into_iter());
    let (lm_b, lc_b) = leading(&pb, &vars)?;
    let mut rem = pa;
    let mut quot = Expr::zero();
    while let Some((lm_r, lc_r)) = leading(&rem, &vars) {
        let mut factors = Vec::new();
        for v in &vars {
            let d = lm_r.power(v) - lm_b.power(v);
            if d < 0 {
                return None;
            }
            factors.push((v.clone(), d));
        }
        let t = Monomial::from_parts(factors, None);
        let c = lc_r / &lc_b;
        quot.add_term(t.clone(), c.clone());
        rem -= &pb.mul_monomial(&t, &c);
    }
    let shift = Monomial::from_parts(
        ma.factors().iter().cloned().chain(mb.factors().iter().map(|(s, e)| (s.clone(), -e))).collect(),
        None,
    );
    Some(quot.mul_monomial(&shift, &Rational::one()))
}

/// Removes monomial and rational content from a row in place.
fn strip_content(row: &mut Row) {
    if row.is_empty() {
        return;
    }
    let m = inverse_monomial(&min_monomial(row.values()));
    let q = rational_content(row.values()).recip();
    scale_all(row.values_mut(), &m, &q);
}

/// Row reduced form with possibly non-unit pivots.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub ncols: usize,
    /// `(pivot column, row)`; every pivot column is zero in all other rows.
    pub rows: Vec<(usize, Row)>,
}

fn pick_pivot(rows: &[Row], c: usize) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (i, r) in rows.iter().enumerate() {
        let Some(e) = r.get(&c) else { continue };
        if e.as_constant().is_some() {
            return Some(i);
        }
        if best.map_or(true, |(_, n)| e.len() < n) {
            best = Some((i, e.len()));
        }
    }
    best.map(|(i, _)| i)
}

fn eliminate(target: &mut Row, c: usize, pivot: &Row) {
    let Some(a) = target.remove(&c) else { return };
    let p = &pivot[&c];
    let unit = p.as_constant().is_some_and(|q| q.is_one());
    if !unit {
        for v in target.values_mut() {
            *v = &*v * p;
        }
    }
    for (&j, v) in pivot {
        if j == c {
            continue;
        }
        let d = &a * v;
        let entry = target.entry(j).or_insert_with(Expr::zero);
        *entry -= &d;
        if entry.is_zero() {
            target.remove(&j);
        }
    }
    if !unit {
        strip_content(target);
        if p.len() > 1 && target.values().all(|v| exact_div(v, p).is_some()) {
            for v in target.values_mut() {
                *v = exact_div(v, p).expect("checked");
            }
        }
    }
}

/// Gauss-Jordan elimination scanning columns in order. Pivot choice: the
/// first row with a constant entry, otherwise the entry with fewest terms.
pub fn row_reduce(rows: Vec<Row>, ncols: usize) -> Echelon {
    let mut pending: Vec<Row> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    for r in &mut pending {
        normalize_row(r);
    }
    let mut done: Vec<(usize, Row)> = Vec::new();
    for c in 0..ncols {
        let Some(i) = pick_pivot(&pending, c) else { continue };
        let mut piv = pending.remove(i);
        if let Some(q) = piv[&c].as_constant() {
            let inv = q.recip();
            for v in piv.values_mut() {
                *v = v.scale(&inv);
            }
        }
        for r in &mut pending {
            eliminate(r, c, &piv);
        }
        pending.retain(|r| !r.is_empty());
        for (_, r) in &mut done {
            eliminate(r, c, &piv);
        }
        done.push((c, piv));
    }
    Echelon { ncols, rows: done }
}

fn normalize_row(r: &mut Row) {
    r.retain(|_, v| !v.is_zero());
    if r.values().all(|v| v.as_constant().is_some()) {
        if let Some(first) = r.values().next().and_then(Expr::as_constant) {
            let inv = first.recip();
            for v in r.values_mut() {
                *v = v.scale(&inv);
            }
        }
    } else {
        strip_content(r);
    }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows.iter().map(|(c, _)| *c).collect()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let piv: BTreeSet<usize> = self.pivot_columns().into_iter().collect();
        (0..self.ncols).filter(|c| !piv.contains(c)).collect()
    }

    /// One normalized null vector per free column, in column order.
    pub fn nullspace(&self) -> Vec<Vec<Expr>> {
        self.free_columns()
            .into_iter()
            .map(|j| {
                let relevant: Vec<&(usize, Row)> = self.rows.iter().filter(|(_, r)| r.contains_key(&j)).collect();
                let mut v = vec![Expr::zero(); self.ncols];
                let product = |skip: Option<usize>| -> Expr {
                    let mut acc = Expr::one();
                    for (k, (c, r)) in relevant.iter().enumerate() {
                        if Some(k) != skip {
                            acc = &acc * &r[c];
                        }
                    }
                    acc
                };
                v[j] = product(None);
                for (k, (c, r)) in relevant.iter().enumerate() {
                    v[*c] = -(&r[&j] * &product(Some(k)));
                }
                normalize_vector(&mut v);
                v
            })
            .collect()
    }
}

/// Rescales a vector to a canonical representative of its line: no monomial
/// or rational content, exact common polynomial factors removed, and the
/// first nonzero entry with a positive leading coefficient.
/// Divides `v` by its first nonzero entry when that entry is a single term.
pub fn make_monic(v: &mut [Expr]) {
    let Some(first) = v.iter().find(|e| !e.is_zero()) else {
        return;
    };
    let Some((m, q)) = first.single_term() else {
        return;
    };
    let (m, q) = (inverse_monomial(m), q.recip());
    scale_all(v.iter_mut(), &m, &q);
}

pub fn normalize_vector(v: &mut [Expr]) {
    if v.iter().all(Expr::is_zero) {
        return;
    }
    let m = inverse_monomial(&min_monomial(v.iter()));
    let q = rational_content(v.iter()).recip();
    scale_all(v.iter_mut(), &m, &q);
    loop {
        let candidates: Vec<Expr> = v.iter().filter(|e| e.len() > 1).cloned().collect();
        let common = candidates.into_iter().find(|d| v.iter().all(|e| exact_div(e, d).is_some()));
        match common {
            Some(d) => {
                for e in v.iter_mut() {
                    *e = exact_div(e, &d).expect("checked");
                }
            }
            None => break,
        }
    }
    let first = v.iter().find(|e| !e.is_zero()).expect("nonzero vector");
    let vars = params_of(std::iter::once(first));
    let (_, lc) = leading(first, &vars).expect("nonzero");
    if lc.is_negative() {
        for e in v.iter_mut() {
            *e = -&*e;
        }
    }
}

fn to_row(v: &[Expr]) -> Row {
    v.iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(i, e)| (i, e.clone())).collect()
}

/// Rank of the span of `vectors` over the parameter fraction field.
pub fn rank(vectors: &[Vec<Expr>]) -> usize {
    let ncols = vectors.iter().map(Vec::len).max().unwrap_or(0);
    row_reduce(vectors.iter().map(|v| to_row(v)).collect(), ncols).rank()
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vec<Expr>], v: &[Expr]) -> bool {
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    rank(&all) == rank(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn row(entries: &[(usize, &str)]) -> Row {
        entries.iter().map(|(i, s)| (*i, p(s))).collect()
    }

    #[test]
    fn division() {
        assert_eq!(exact_div(&p("a^2 - b^2"), &p("a + b")), Some(p("a - b")));
        assert_eq!(exact_div(&p("a^2 + b^2"), &p("a + b")), None);
        assert_eq!(exact_div(&p("a*ell^-2 + a^2*ell^-2"), &p("1 + a")), Some(p("a*ell^-2")));
        assert_eq!(exact_div(&p("6*a"), &p("3")), Some(p("2*a")));
        assert_eq!(exact_div(&p("a"), &p("0")), None);
    }

    #[test]
    fn constant_system() {
        // x0 + 2 x1 = 0, x2 = 0 over three unknowns
        let e = row_reduce(vec![row(&[(0, "1"), (1, "2")]), row(&[(2, "3")]), row(&[(0, "2"), (1, "4")])], 3);
        assert_eq!(e.rank(), 2);
        let ns = e.nullspace();
        assert_eq!(ns, vec![vec![p("2"), p("-1"), p("0")]]);
    }

    #[test]
    fn parametric_system() {
        // a x0 + b x1 = 0
        let e = row_reduce(vec![row(&[(0, "a"), (1, "b")])], 2);
        assert_eq!(e.nullspace(), vec![vec![p("b"), p("-a")]]);
        // a x0 - a^2 x1 = 0 → x0 = a x1
        let e = row_reduce(vec![row(&[(0, "a"), (1, "-a^2")])], 2);
        assert_eq!(e.nullspace(), vec![vec![p("a"), p("1")]]);
        // (a+1) x0 + (a^2-1) x1 = 0 → x0 = (1-a) x1
        let e = row_reduce(vec![row(&[(0, "a + 1"), (1, "a^2 - 1")])], 2);
        assert_eq!(e.nullspace(), vec![vec![p("a - 1"), p("-1")]]);
    }

    #[test]
    fn null_vectors_solve_rows() {
        let rows = vec![
            row(&[(0, "a"), (1, "1"), (3, "b")]),
            row(&[(1, "ell^-2"), (2, "a*b"), (3, "-1")]),
            row(&[(0, "2*a"), (2, "3")]),
        ];
        let e = row_reduce(rows.clone(), 5);
        let ns = e.nullspace();
        assert_eq!(ns.len(), 5 - e.rank());
        for v in &ns {
            for r in &rows {
                let s: Expr = r.iter().map(|(j, c)| c * &v[*j]).sum();
                assert!(s.is_zero(), "{s}");
            }
        }
    }

    #[test]
    fn span_membership() {
        let b = vec![vec![p("1"), p("a")], vec![p("0"), p("1")]];
        assert!(in_span(&b, &[p("3"), p("b")]));
        let b = vec![vec![p("1"), p("a")]];
        assert!(in_span(&b, &[p("b"), p("a*b")]));
        assert!(!in_span(&b, &[p("1"), p("b")]));
    }

    #[test]
    fn normalization_is_canonical() {
        let mut v = vec![p("-2*a^2 - 2*a*b"), p("4*a")];
        normalize_vector(&mut v);
        assert_eq!(v, vec![p("a + b"), p("-2")]);
    }

    #[test]
    fn monic_only_for_single_terms() {
        let mut v = vec![Expr::zero(), p("2*ell^2"), p("ell^2 + 1")];
        make_monic(&mut v);
        assert_eq!(v, vec![Expr::zero(), p("1"), p("1/2 + (1/2)*ell^-2")]);
        let mut w = vec![p("a + 1"), p("a")];
        make_monic(&mut w);
        assert_eq!(w, vec![p("a + 1"), p("a")]);
    }
}
