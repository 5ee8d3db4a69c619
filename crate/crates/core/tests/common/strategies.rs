use std::collections::HashMap;

use noether_approx::expr::{Basis, Expr, Monomial, Rational, Symbol, Trig};
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn symbols() -> Vec<Symbol> {
    vec![Symbol::Phi, Symbol::u(), Symbol::up(), Symbol::upp(), Symbol::param("a0"), Symbol::param("ell")]
}

pub fn term() -> impl Strategy<Value = (Monomial, Rational)> {
    (
        -9i64..=9,
        1i64..=6,
        prop::collection::vec((0usize..6, -2i32..=3), 0..4),
        prop::option::of((any::<bool>(), 1u32..=3)),
    )
        .prop_map(|(n, d, fs, trig)| {
            let syms = symbols();
            let factors = fs
                .into_iter()
                .map(|(i, e)| (syms[i].clone(), if i == 0 { e.abs() } else { e }))
                .collect();
            let trig = trig.map(|(s, m)| if s { Trig::sin(m) } else { Trig::cos(m) });
            let q = Rational::new(BigInt::from(if n == 0 { 1 } else { n }), BigInt::from(d));
            (Monomial::from_parts(factors, trig), q)
        })
}

pub fn expr() -> impl Strategy<Value = Expr> {
    prop::collection::vec(term(), 0..6).prop_map(Expr::from_terms)
}

pub fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.4f64..1.6, 6)
}

pub fn env(values: &[f64]) -> HashMap<Symbol, f64> {
    symbols().into_iter().zip(values.iter().copied()).collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

pub const UNKNOWNS: usize = 4;

/// `x_j * q * up^a * upp^b * param^c * u^n * element` with in-range powers.
fn basis_term(basis: Basis) -> impl Strategy<Value = Expr> {
    (0..UNKNOWNS, -5i64..=5, 0i32..=2, 0i32..=1, -1i32..=1, -4i32..=6, 0..basis.len())
        .prop_map(move |(j, q, a, b, c, n, e)| {
            let m = Monomial::from_parts(
                vec![
                    (Symbol::param(format!("x{j}")), 1),
                    (Symbol::up(), a),
                    (Symbol::upp(), b),
                    (Symbol::param("a0"), c),
                    (Symbol::u(), n),
                ],
                None,
            );
            let q = Rational::from_integer(BigInt::from(if q == 0 { 1 } else { q }));
            basis.elements()[e].to_expr().mul_monomial(&m, &q)
        })
}

pub fn residual() -> impl Strategy<Value = Expr> {
    prop::collection::vec(basis_term(Basis::default()), 0..12).prop_map(|ts| ts.into_iter().sum())
}

pub fn unknown_names() -> Vec<String> {
    (0..UNKNOWNS).map(|j| format!("x{j}")).collect()
}
