#![allow(dead_code)]

pub mod strategies;

use noether_approx::expr::{parse, Expr};
use noether_approx::noether::{residual_order_k, PerturbedLagrangian};
use noether_approx::solve::{generator_parts, generator_span_contains, SolutionSpace};

pub fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

pub fn lagrangian(g: [&str; 3], params: &[&str]) -> PerturbedLagrangian {
    let params = params.iter().map(|n| (n.to_string(), None)).collect();
    PerturbedLagrangian::new("t", g.map(p), params).unwrap()
}

/// First failing `(vector, order, residual)` if any.
pub fn back_substitution(l: &PerturbedLagrangian, s: &SolutionSpace) -> Option<(usize, usize, Expr)> {
    for i in 0..s.dim() {
        let (x, a) = s.decode(i);
        for j in 0..=s.order {
            let r = residual_order_k(l, &x, &a, j).unwrap();
            if !r.is_zero() {
                return Some((i, j, r));
            }
        }
    }
    None
}

fn parts_of(s: &SolutionSpace, nontrivial: bool) -> Vec<Vec<(Expr, Expr)>> {
    (0..s.dim()).filter(|i| s.labels[*i].is_nontrivial() == nontrivial).map(|i| generator_parts(s, i)).collect()
}

/// Whether `target` is a solution that is nontrivial: it lies in the solution
/// span, but not in the span of the trivial solutions.
pub fn nontrivial_member(s: &SolutionSpace, target: &[(Expr, Expr)]) -> bool {
    let trivial = parts_of(s, false);
    let mut all = trivial.clone();
    all.extend(parts_of(s, true));
    generator_span_contains(&all, target) && !generator_span_contains(&trivial, target)
}

pub fn pair(xi: &str, eta: &str) -> (Expr, Expr) {
    (p(xi), p(eta))
}

/// The four added first-order generators of the quadratic perturbation.
pub fn quadratic_targets() -> Vec<(&'static str, Vec<(Expr, Expr)>)> {
    vec![
        (
            "M",
            vec![
                pair("sin(2*phi)", "u*cos(2*phi)"),
                pair("a0*phi*cos(2*phi) - a0*sin(2*phi)", "-(1/2)*a0*u*cos(2*phi) - a0*u*phi*sin(2*phi) + a1*cos(2*phi)"),
            ],
        ),
        (
            "N",
            vec![
                pair("cos(2*phi)", "-u*sin(2*phi)"),
                pair("-(1/2)*a0*cos(2*phi) - phi*a0*sin(2*phi)", "-phi*a0*u*cos(2*phi) - a1*sin(2*phi)"),
            ],
        ),
        ("O", vec![pair("0", "sin(phi)"), pair("0", "(1/2)*a0*phi*cos(phi) - (1/4)*a0*sin(phi)")]),
        ("P", vec![pair("0", "cos(phi)"), pair("0", "-(1/4)*a0*cos(phi) - (1/2)*phi*a0*sin(phi)")]),
    ]
}

pub const ORBITAL_G1: &str = "-(1/2)*ell^-2*u - (1/2)*u^3";

/// The two first-order orbital generators, paired with the exact generator
/// they actually correct.
pub fn orbital_targets() -> Vec<(&'static str, Vec<(Expr, Expr)>)> {
    vec![
        ("X0^5 + eps X1", vec![pair("0", "cos(phi)"), pair("2*sin(phi)", "u*cos(phi)")]),
        ("X0^4 + eps X2", vec![pair("0", "sin(phi)"), pair("-2*cos(phi)", "u*sin(phi)")]),
    ]
}

/// `I0^4 + eps J` and `I0^5 + eps J'` for the two orbital generators.
pub fn orbital_integrals() -> [[&'static str; 2]; 2] {
    [
        [
            "-up*cos(phi) - u*sin(phi)",
            "up^2*sin(phi) - u*up*cos(phi) + (1/2)*u^2*sin(phi) + (1/2)*ell^-2*sin(phi)",
        ],
        [
            "-up*sin(phi) + u*cos(phi)",
            "-up^2*cos(phi) - u*up*sin(phi) - (1/2)*u^2*cos(phi) - (1/2)*ell^-2*cos(phi)",
        ],
    ]
}
