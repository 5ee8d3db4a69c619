use num_rational::BigRational;
use serde::Serialize;

use super::{Expr, Monomial, Symbol, Trig};

/// One basis function `phi^p * trig`, where `trig` is `None` for the constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisElem {
    pub phi: u32,
    #[serde(skip)]
    pub trig: Option<Trig>,
}

impl BasisElem {
    pub fn to_expr(&self) -> Expr {
        let factors = if self.phi == 0 { vec![] } else { vec![(Symbol::Phi, self.phi as i32)] };
        Expr::term(BigRational::from_integer(1.into()), Monomial::from_parts(factors, self.trig))
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let t = match self.trig {
            None => 1.0,
            Some(t) => {
                let x = t.m as f64 * phi;
                match t.kind {
                    super::TrigKind::Sin => x.sin(),
                    super::TrigKind::Cos => x.cos(),
                }
            }
        };
        phi.powi(self.phi as i32) * t
    }

    pub fn name(&self) -> String {
        let e = self.to_expr();
        e.to_string()
    }
}

/// The span `phi^p * {1, sin(m phi), cos(m phi)}` for `p <= p_max`, `1 <= m <= m_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Basis {
    pub p_max: u32,
    pub m_max: u32,
}

impl Default for Basis {
    fn default() -> Self {
        Basis { p_max: 1, m_max: 2 }
    }
}

impl Basis {
    pub fn new(p_max: u32, m_max: u32) -> Self {
        Basis { p_max, m_max }
    }

    pub fn elements(&self) -> Vec<BasisElem> {
        let mut out = Vec::with_capacity(self.len());
        for p in 0..=self.p_max {
            out.push(BasisElem { phi: p, trig: None });
            for m in 1..=self.m_max {
                out.push(BasisElem { phi: p, trig: Some(Trig::sin(m)) });
                out.push(BasisElem { phi: p, trig: Some(Trig::cos(m)) });
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        ((self.p_max + 1) * (2 * self.m_max + 1)) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of `phi^p * trig` in [`Basis::elements`], if it lies in the span.
    pub fn index_of(&self, p: u32, trig: Option<Trig>) -> Option<usize> {
        if p > self.p_max {
            return None;
        }
        let per = 2 * self.m_max as usize + 1;
        let within = match trig {
            None => 0,
            Some(t) if t.m >= 1 && t.m <= self.m_max => {
                let k = 1 + 2 * (t.m as usize - 1);
                match t.kind {
                    super::TrigKind::Sin => k,
                    super::TrigKind::Cos => k + 1,
                }
            }
            Some(_) => return None,
        };
        Some(p as usize * per + within)
    }

    pub fn names(&self) -> Vec<String> {
        self.elements().iter().map(BasisElem::name).collect()
    }

    /// Evaluates every element at `2 * len` distinct sample points and checks
    /// that the sample matrix has full column rank. The samples are rounded to
    /// rationals with denominator 10^12 and the rank is computed exactly.
    pub fn audit_full_rank(&self) -> bool {
        let elems = self.elements();
        let n = elems.len();
        let rows: Vec<Vec<i64>> = (0..2 * n)
            .map(|k| {
                let phi = 0.37 + 0.61 * k as f64;
                elems.iter().map(|e| (e.eval(phi) * 1e12).round() as i64).collect()
            })
            .collect();
        modular_rank(rows) == n
    }
}

const PRIME: u128 = (1 << 61) - 1;

fn pow_mod(mut b: u128, mut e: u128) -> u128 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    acc
}

/// Rank of an integer matrix over `Z/p`, a lower bound for its rank over the rationals.
pub(crate) fn modular_rank(rows: Vec<Vec<i64>>) -> usize {
    let mut rows: Vec<Vec<u128>> =
        rows.into_iter().map(|r| r.into_iter().map(|x| x.rem_euclid(PRIME as i64) as u128).collect()).collect();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][c], PRIME - 2);
        let pivot_row = rows[rank].clone();
        for r in rank + 1..rows.len() {
            if rows[r][c] != 0 {
                let f = rows[r][c] * inv % PRIME;
                for k in c..ncols {
                    rows[r][k] = (rows[r][k] + PRIME - f * pivot_row[k] % PRIME) % PRIME;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_basis_has_ten_members() {
        let b = Basis::default();
        assert_eq!(b.len(), 10);
        assert_eq!(b.elements().len(), 10);
        let names = b.names();
        assert_eq!(names[0], "1");
        assert!(names.contains(&"phi*cos(2*phi)".to_string()));
    }

    #[test]
    fn index_matches_elements() {
        let b = Basis::new(1, 3);
        for (i, e) in b.elements().iter().enumerate() {
            assert_eq!(b.index_of(e.phi, e.trig), Some(i));
        }
        assert_eq!(b.index_of(2, None), None);
        assert_eq!(b.index_of(0, Some(Trig::cos(4))), None);
    }

    #[test]
    fn audit_passes() {
        assert!(Basis::default().audit_full_rank());
        assert!(Basis::new(2, 3).audit_full_rank());
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(modular_rank(vec![vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(modular_rank(vec![vec![1, 2], vec![0, -4]]), 2);
    }
}
