//! Numerical integration of the perturbed equation of motion and drift of
//! approximate first integrals along it.

use std::collections::HashMap;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::expr::{CompiledExpr, Expr, Symbol};
use crate::integrals::FirstIntegral;
use crate::noether::{euler_lagrange, PerturbedLagrangian};

const GUARD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub phi: Vec<f64>,
    pub u: Vec<f64>,
    pub up: Vec<f64>,
    pub eps: f64,
    pub params: HashMap<Symbol, f64>,
    pub method: &'static str,
    pub h: f64,
}

fn vars() -> [Symbol; 3] {
    [Symbol::Phi, Symbol::u(), Symbol::up()]
}

/// `eps`-weighted sum of the parts, compiled over `(phi, u, up)`.
fn compile_series(parts: &[Expr], eps: f64, params: &HashMap<Symbol, f64>) -> Result<CompiledExpr> {
    let mut total = Expr::zero();
    let mut frozen = params.clone();
    for (k, e) in parts.iter().enumerate() {
        let name = format!("eps_pow_{k}");
        frozen.insert(Symbol::param(name.clone()), eps.powi(k as i32));
        total += &(e * &Expr::param(&name));
    }
    Ok(CompiledExpr::new(&total, &vars(), &frozen)?)
}

/// Fixed-step classical Runge-Kutta integration of `upp = F(phi, u, up)` on
/// `[0, phi_end]`, with `F` the solved equation of motion through `order`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_el(
    l: &PerturbedLagrangian,
    order: usize,
    eps: f64,
    params: &HashMap<Symbol, f64>,
    u0: f64,
    up0: f64,
    phi_end: f64,
    h: f64,
) -> Result<Trajectory> {
    if l.is_higher_order(order) {
        return Err(Error::Refused(
            "the perturbation depends on upp, so the equation of motion is of fourth order and no first-integral formula applies".into(),
        ));
    }
    if !(h > 0.0) || !(phi_end > 0.0) {
        return Err(Error::Input("step and interval length must be positive".into()));
    }
    let f = euler_lagrange(l, order).solved(order)?;
    let rhs = compile_series(&f.0, eps, params)?;
    let singular = rhs.has_negative_powers(1);
    let steps = (phi_end / h).round().max(1.0) as usize;
    let h = phi_end / steps as f64;
    let mut t = Trajectory { phi: vec![0.0], u: vec![u0], up: vec![up0], eps, params: params.clone(), method: "rk4", h };
    let accel = |phi: f64, u: f64, up: f64| -> Result<f64> {
        if singular && u.abs() < GUARD {
            return Err(Error::Singularity(format!("|u| < {GUARD:e} at phi = {phi}")));
        }
        Ok(rhs.eval(&[phi, u, up]))
    };
    let (mut phi, mut u, mut up) = (0.0, u0, up0);
    for n in 1..=steps {
        let k1u = up;
        let k1v = accel(phi, u, up)?;
        let k2u = up + 0.5 * h * k1v;
        let k2v = accel(phi + 0.5 * h, u + 0.5 * h * k1u, k2u)?;
        let k3u = up + 0.5 * h * k2v;
        let k3v = accel(phi + 0.5 * h, u + 0.5 * h * k2u, k3u)?;
        let k4u = up + h * k3v;
        let k4v = accel(phi + h, u + h * k3u, k4u)?;
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        up += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        phi = n as f64 * h;
        if !u.is_finite() || !up.is_finite() {
            return Err(Error::Singularity(format!("solution blew up at phi = {phi}")));
        }
        t.phi.push(phi);
        t.u.push(u);
        t.up.push(up);
    }
    Ok(t)
}

/// Values of `I` along `t` and the maximal deviation from the initial value.
pub fn conservation_drift(i: &FirstIntegral, t: &Trajectory) -> Result<(f64, Vec<f64>)> {
    let c = compile_series(&i.parts, t.eps, &t.params)?;
    let mut profile = Vec::with_capacity(t.phi.len());
    for n in 0..t.phi.len() {
        profile.push(c.try_eval(&[t.phi[n], t.u[n], t.up[n]])?);
    }
    let i0 = profile[0];
    let drift = profile.iter().fold(0.0f64, |m, v| m.max((v - i0).abs()));
    Ok((drift, profile))
}

/// Tab separated `phi, u, up, I` lines with a header.
pub fn export_tsv(t: &Trajectory, profile: &[f64]) -> String {
    let mut out = String::from("phi\tu\tup\tI\n");
    for n in 0..t.phi.len() {
        let _ = writeln!(out, "{:.12e}\t{:.12e}\t{:.12e}\t{:.12e}", t.phi[n], t.u[n], t.up[n], profile.get(n).copied().unwrap_or(f64::NAN));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn orbital() -> PerturbedLagrangian {
        PerturbedLagrangian::new("o", [p("-(1/2)*ell^-2*u - (1/2)*u^3"), p("0"), p("0")], vec![("ell".into(), None)]).unwrap()
    }

    fn ell2() -> HashMap<Symbol, f64> {
        [(Symbol::param("ell"), 2.0)].into_iter().collect()
    }

    #[test]
    fn harmonic_oscillator_is_cosine() {
        let l = PerturbedLagrangian::unperturbed();
        let tau = 2.0 * std::f64::consts::PI;
        let t = integrate_el(&l, 0, 0.0, &HashMap::new(), 1.0, 0.0, tau, 1e-3).unwrap();
        let err = t.phi.iter().zip(&t.u).fold(0.0f64, |m, (phi, u)| m.max((u - phi.cos()).abs()));
        assert!(err < 1e-8, "{err}");
        assert!(t.phi.windows(2).all(|w| w[1] > w[0]));
        let energy = FirstIntegral { parts: vec![p("(1/2)*u^2 + (1/2)*up^2")] };
        assert!(conservation_drift(&energy, &t).unwrap().0 < 1e-8);
    }

    #[test]
    fn orbital_without_perturbation_is_cosine() {
        let t = integrate_el(&orbital(), 1, 0.0, &ell2(), 1.0, 0.0, 6.0, 1e-3).unwrap();
        let err = t.phi.iter().zip(&t.u).fold(0.0f64, |m, (phi, u)| m.max((u - phi.cos()).abs()));
        assert!(err < 1e-8);
    }

    #[test]
    fn energy_drift_shrinks_with_step() {
        let l = PerturbedLagrangian::unperturbed();
        let energy = FirstIntegral { parts: vec![p("(1/2)*u^2 + (1/2)*up^2")] };
        let d = |h: f64| {
            let t = integrate_el(&l, 0, 0.0, &HashMap::new(), 1.0, 0.0, 20.0, h).unwrap();
            conservation_drift(&energy, &t).unwrap().0
        };
        assert!(d(0.1) / d(0.05) >= 8.0);
    }

    #[test]
    fn guards() {
        let gup = PerturbedLagrangian::new("g", [p("-(1/2)*upp^2"), p("0"), p("0")], vec![]).unwrap();
        assert!(matches!(integrate_el(&gup, 1, 1e-3, &HashMap::new(), 1.0, 0.0, 1.0, 1e-2), Err(Error::Refused(_))));
        let lag = PerturbedLagrangian::new("r", [p("u^-2"), p("0"), p("0")], vec![]).unwrap();
        assert!(matches!(integrate_el(&lag, 1, 1e-3, &HashMap::new(), 0.0, 0.0, 1.0, 1e-2), Err(Error::Singularity(_))));
        assert!(matches!(integrate_el(&orbital(), 1, 1e-3, &HashMap::new(), 1.0, 0.0, 1.0, 1e-2), Err(Error::Expr(_))));
    }

    #[test]
    fn export_has_one_line_per_point() {
        let t = integrate_el(&PerturbedLagrangian::unperturbed(), 0, 0.0, &HashMap::new(), 1.0, 0.0, 1.0, 0.25).unwrap();
        let text = export_tsv(&t, &[0.0; 5]);
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("phi\tu\tup\tI\n"));
    }
}
