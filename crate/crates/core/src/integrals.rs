//! Approximate first integrals from a Noether generator and its gauge.

use crate::error::{Error, Result};
use crate::expr::{Expr, Symbol};
use crate::noether::{euler_lagrange, residual_order_k, ApproxGenerator, GaugeTerm, PerturbedLagrangian};

/// `I = I0 + eps I1 + ...` as functions of `(phi, u, up)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FirstIntegral {
    pub parts: Vec<Expr>,
}

impl FirstIntegral {
    pub fn max_order(&self) -> usize {
        self.parts.len().saturating_sub(1)
    }

    pub fn part(&self, k: usize) -> Expr {
        self.parts.get(k).cloned().unwrap_or_default()
    }

    /// The same integral cut after order `k`.
    pub fn truncated(&self, k: usize) -> FirstIntegral {
        FirstIntegral { parts: self.parts.iter().take(k + 1).cloned().collect() }
    }
}

/// `I = xi (L - up L_up) + eta L_up - A`, expanded in `eps` through `order`.
///
/// This sign makes `X0^1 = d_phi` give the energy `(u^2 + up^2) / 2`.
pub fn first_integral(l: &PerturbedLagrangian, x: &ApproxGenerator, a: &GaugeTerm, order: usize) -> Result<FirstIntegral> {
    if l.is_higher_order(order) {
        return Err(Error::HigherOrderLagrangian);
    }
    for j in 0..=order {
        let r = residual_order_k(l, x, a, j)?;
        if !r.is_zero() {
            return Err(Error::NotASymmetry { order: j, residual: r.to_string() });
        }
    }
    Ok(first_integral_unchecked(l, x, a, order))
}

/// [`first_integral`] without the symmetry check.
pub fn first_integral_unchecked(l: &PerturbedLagrangian, x: &ApproxGenerator, a: &GaugeTerm, order: usize) -> FirstIntegral {
    let up = Expr::up();
    let parts = (0..=order)
        .map(|k| {
            let mut ik = -a.part(k);
            for i in 0..=k {
                let g = l.g(k - i);
                if g.is_zero() {
                    continue;
                }
                let (xi, eta) = x.part(i);
                let g_up = g.diff(&Symbol::up());
                ik += &(&xi * &(&g - &(&up * &g_up)));
                ik += &(&eta * &g_up);
            }
            ik
        })
        .collect();
    FirstIntegral { parts }
}

/// `D I` with `upp` replaced by the solved equation of motion, per order.
/// All parts vanish exactly when `I` is conserved through `order`.
pub fn conservation_check_symbolic(i: &FirstIntegral, l: &PerturbedLagrangian, order: usize) -> Result<Vec<Expr>> {
    let f = euler_lagrange(l, order).solved(order)?;
    let mut out = vec![Expr::zero(); order + 1];
    for k in 0..=order.min(i.max_order()) {
        let d = i.part(k).total_derivative();
        let s = f.substitute_into(&d, &Symbol::upp(), order - k)?;
        for (m, e) in s.0.into_iter().enumerate() {
            out[k + m] += &e;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::noether::ExactBasis;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn exact_pair(h: usize) -> (ApproxGenerator, GaugeTerm) {
        (ApproxGenerator::exact(h), GaugeTerm { parts: vec![ExactBasis::new().gauge[h - 1].clone()] })
    }

    #[test]
    fn exact_integrals_match_the_published_list() {
        let l = PerturbedLagrangian::unperturbed();
        let published = [
            "(1/2)*u^2 + (1/2)*up^2",
            "(1/2)*up^2*sin(2*phi) - (1/2)*u^2*sin(2*phi) - u*up*cos(2*phi)",
            "(1/2)*up^2*cos(2*phi) - (1/2)*u^2*cos(2*phi) + u*up*sin(2*phi)",
            "-up*sin(phi) + u*cos(phi)",
            "-up*cos(phi) - u*sin(phi)",
        ];
        for (h, want) in (1..=5).zip(published) {
            let (x, a) = exact_pair(h);
            let i = first_integral(&l, &x, &a, 0).unwrap();
            assert_eq!(i.parts, vec![p(want)], "h = {h}");
            assert!(conservation_check_symbolic(&i, &l, 0).unwrap()[0].is_zero());
        }
        assert_eq!(p("-up*sin(phi) + u*cos(phi)").to_string(), "-up*sin(phi) + u*cos(phi)");
    }

    #[test]
    fn orbital_integral() {
        let l = PerturbedLagrangian::new("o", [p("-(1/2)*ell^-2*u - (1/2)*u^3"), p("0"), p("0")], vec![("ell".into(), None)]).unwrap();
        let x = ApproxGenerator { order0: ApproxGenerator::exact(5).order0, corrections: vec![(p("2*sin(phi)"), p("u*cos(phi)"))] };
        let a = GaugeTerm { parts: vec![p("u*sin(phi)"), p("(1/2)*u^2*sin(phi) - (1/2)*ell^-2*sin(phi)")] };
        let i = first_integral(&l, &x, &a, 1).unwrap();
        assert_eq!(i.part(0), p("-up*cos(phi) - u*sin(phi)"));
        assert_eq!(i.part(1), p("up^2*sin(phi) - u*up*cos(phi) + (1/2)*u^2*sin(phi) + (1/2)*ell^-2*sin(phi)"));
        let check = conservation_check_symbolic(&i, &l, 1).unwrap();
        assert!(check.iter().all(Expr::is_zero));
        // dropping the first-order gauge breaks conservation
        let broken = FirstIntegral { parts: vec![i.part(0), &i.part(1) + &a.part(1)] };
        assert!(!conservation_check_symbolic(&broken, &l, 1).unwrap()[1].is_zero());
    }

    #[test]
    fn refuses_bad_inputs() {
        let gup = PerturbedLagrangian::new("g", [p("-(1/2)*upp^2"), p("0"), p("0")], vec![]).unwrap();
        let (x, a) = exact_pair(1);
        let x1 = ApproxGenerator { corrections: vec![(p("0"), p("0"))], ..x.clone() };
        let a1 = GaugeTerm { parts: vec![a.part(0), p("0")] };
        assert_eq!(first_integral(&gup, &x1, &a1, 1), Err(Error::HigherOrderLagrangian));
        let l = PerturbedLagrangian::unperturbed();
        let wrong = GaugeTerm { parts: vec![p("u")] };
        assert!(matches!(first_integral(&l, &ApproxGenerator::exact(4), &wrong, 0), Err(Error::NotASymmetry { .. })));
    }

    #[test]
    fn integral_is_linear() {
        let l = PerturbedLagrangian::unperturbed();
        let b = ExactBasis::new();
        let c: [Expr; 5] = [p("2"), p("0"), p("-3"), p("1/2"), p("a")];
        let x = ApproxGenerator { order0: c.clone(), corrections: vec![] };
        let a = GaugeTerm::exact(&c, &Expr::zero());
        let combined = first_integral_unchecked(&l, &x, &a, 0).part(0);
        let mut sum = Expr::zero();
        for h in 0..5 {
            let (xh, ah) = (ApproxGenerator::exact(h + 1), GaugeTerm { parts: vec![b.gauge[h].clone()] });
            sum += &(&c[h] * &first_integral_unchecked(&l, &xh, &ah, 0).part(0));
        }
        assert_eq!(combined, sum);
    }
}
