//! Built-in cases and the `conditions`, `solve` and `verify` commands.

use std::path::Path;

use crate::case::CaseFile;
use crate::error::{Error, Result};
use crate::expr::{Expr, Rational};
use crate::integrals::{first_integral, FirstIntegral};
use crate::noether::{free_lagrangian, generic_residual, PerturbedLagrangian};
use crate::report::*;
use crate::separate::collect_jet;
use crate::solve::{solve_sequence, Label, SolutionSpace};
use crate::verify::{conservation_drift, export_tsv, integrate_el};

pub const BUILTINS: [(&str, &str); 7] = [
    ("unperturbed", include_str!("../cases/unperturbed.case")),
    ("quadratic", include_str!("../cases/quadratic.case")),
    ("gup", include_str!("../cases/gup.case")),
    ("orbital", include_str!("../cases/orbital.case")),
    ("schwarzschild", include_str!("../cases/schwarzschild.case")),
    ("reissner-nordstrom", include_str!("../cases/reissner-nordstrom.case")),
    ("bardeen", include_str!("../cases/bardeen.case")),
];

/// Drifts below this are treated as integrator round-off.
pub const DRIFT_FLOOR: f64 = 1e-10;

pub fn builtin(name: &str) -> Option<CaseFile> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, text)| CaseFile::parse(text).expect("builtin cases parse"))
}

/// A built-in case by name, or else a case file path.
pub fn load_case(name: &str) -> Result<CaseFile> {
    if let Some(c) = builtin(name) {
        return Ok(c);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(Error::Input(format!("`{name}` is neither a built-in case nor a readable file")));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{name}: {e}")))?;
    CaseFile::parse(&text)
}

/// Command-line adjustments applied to a case before running it.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub basis_p: Option<u32>,
    pub basis_m: Option<u32>,
    pub u_min: Option<i32>,
    pub u_max: Option<i32>,
    pub deg_xi: Option<u32>,
    pub deg_eta: Option<u32>,
    pub deg_gauge: Option<u32>,
    pub set: Vec<(String, Rational)>,
}

impl Overrides {
    pub fn apply(&self, case: &CaseFile) -> Result<CaseFile> {
        let mut c = case.specialize(&self.set)?;
        let s = &mut c.solver;
        s.basis.p_max = self.basis_p.unwrap_or(s.basis.p_max);
        s.basis.m_max = self.basis_m.unwrap_or(s.basis.m_max);
        s.u_range.0 = self.u_min.unwrap_or(s.u_range.0);
        s.u_range.1 = self.u_max.unwrap_or(s.u_range.1);
        s.deg_xi = self.deg_xi.unwrap_or(s.deg_xi);
        s.deg_eta = self.deg_eta.unwrap_or(s.deg_eta);
        s.deg_gauge = self.deg_gauge.unwrap_or(s.deg_gauge);
        Ok(c)
    }
}

/// `name=value` with an exact rational value.
pub fn parse_assignment(text: &str) -> Result<(String, Rational)> {
    let (name, value) = text.split_once('=').ok_or_else(|| Error::Input(format!("expected name=value, got `{text}`")))?;
    let q = crate::expr::parse(value)?
        .as_constant()
        .ok_or_else(|| Error::Input(format!("`{value}` is not a rational constant")))?;
    Ok((name.trim().to_string(), q))
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Expr(_) => 2,
        Error::BasisOverflow { .. } => 3,
        Error::Refused(_) | Error::Singularity(_) | Error::HigherOrderLagrangian | Error::HigherOrderEquation => 4,
        Error::NotASymmetry { .. } | Error::MissingOrder(_) => 1,
    }
}

fn header(case: &CaseFile) -> Header {
    let highest = (1..=3).rev().find(|&i| !case.g[i - 1].is_zero()).unwrap_or(0);
    let mut lagrangian = free_lagrangian().to_string();
    for i in 1..=highest {
        if !case.g[i - 1].is_zero() {
            let eps = if i == 1 { "eps".to_string() } else { format!("eps^{i}") };
            lagrangian.push_str(&format!(" + {eps}*G{i}"));
        }
    }
    Header {
        case: case.label.clone(),
        description: case.description.clone(),
        lagrangian,
        perturbations: case.g[..highest.max(1)].iter().map(Expr::to_string).collect(),
        parameters: case.parameters.iter().map(|(n, v)| Parameter { name: n.clone(), value: v.as_ref().map(|q| q.to_string()) }).collect(),
    }
}

/// The order-`k` residual for a symbolic generator, grouped by jet monomial.
pub fn run_conditions(case: &CaseFile, k: usize) -> Result<ConditionsReport> {
    let l = case.lagrangian()?;
    let r = generic_residual(&l, k);
    let by_jet = collect_jet(&r)
        .into_iter()
        .map(|(m, c)| JetCoefficient {
            jet: Expr::term(Rational::from_integer(1.into()), m).to_string(),
            coefficient: c.to_string(),
        })
        .collect();
    let generator = if k == 0 {
        "sum c_h X0^h with gauge constant c6".to_string()
    } else {
        format!("sum c_h X0^h + sum_j eps^j (xi_j, eta_j), gauge A0 + c6 + sum_j eps^j gauge_j, j = 1..{k}")
    };
    Ok(ConditionsReport { header: header(case), order: k, generator, residual: r.to_string(), by_jet })
}

fn ansatz(case: &CaseFile) -> Ansatz {
    let s = &case.solver;
    Ansatz {
        basis_p: s.basis.p_max,
        basis_m: s.basis.m_max,
        basis_functions: s.basis.names(),
        u_min: s.u_range.0,
        u_max: s.u_range.1,
        deg_xi: s.deg_xi,
        deg_eta: s.deg_eta,
        deg_gauge: s.deg_gauge,
    }
}

/// First integral of solution vector `i`, or `None` for higher-order Lagrangians.
pub fn integral_of(l: &PerturbedLagrangian, space: &SolutionSpace, i: usize) -> Result<Option<FirstIntegral>> {
    if l.is_higher_order(space.order) {
        return Ok(None);
    }
    let (x, a) = space.decode(i);
    first_integral(l, &x, &a, space.order).map(Some)
}

fn order_report(l: &PerturbedLagrangian, space: &SolutionSpace) -> Result<OrderReport> {
    let mut generators = Vec::new();
    for (i, label) in space.labels.iter().enumerate() {
        let (x, a) = space.decode(i);
        let parts: Vec<(Expr, Expr)> = (0..=space.order).map(|j| x.part(j)).collect();
        let integral = if *label == Label::TrivialLift {
            None
        } else {
            integral_of(l, space, i)?.map(|f| f.parts.iter().map(Expr::to_string).collect())
        };
        generators.push(GeneratorReport {
            index: i,
            label: label.name().to_string(),
            xi: parts.iter().map(|p| p.0.to_string()).collect(),
            eta: parts.iter().map(|p| p.1.to_string()).collect(),
            gauge: (0..=space.order).map(|j| a.part(j).to_string()).collect(),
            integral,
        });
    }
    Ok(OrderReport {
        order: space.order,
        unknowns: space.unknowns,
        equations: space.equations,
        dimension: space.dim(),
        nontrivial: space.nontrivial_count(),
        new_nontrivial: space.new_nontrivial,
        trivial_lifts: space.labels.iter().filter(|l| **l == Label::TrivialLift).count(),
        extensions: space.extends.iter().map(|&(generator, extends)| Extension { generator, extends }).collect(),
        generators,
    })
}

pub fn run_solve(case: &CaseFile, max_order: usize) -> Result<SolveReport> {
    let l = case.lagrangian()?;
    let spaces = solve_sequence(&l, max_order, &case.solver)?;
    let orders = spaces.iter().map(|s| order_report(&l, s)).collect::<Result<Vec<_>>>()?;
    let mut notes = vec![format!(
        "generators are complete within the ansatz above; enlarge it with --basis-p, --basis-m, --u-min, --u-max and the degree flags to search further"
    )];
    if l.is_higher_order(max_order) {
        notes.push(
            "a perturbation depends on upp; no first-integral formula is available for such higher-order Lagrangians, so integrals are omitted".into(),
        );
    }
    Ok(SolveReport { header: header(case), ansatz: ansatz(case), orders, notes })
}

/// Ratio range for a drift that scales like `eps^(k + 1)` under halving.
fn expected_range(k: usize) -> (f64, f64) {
    let r = 2f64.powi(k as i32 + 1);
    if k == 0 {
        (1.5, 2.5)
    } else {
        (r - 1.0, r + 1.0)
    }
}

/// Drift table of the exact and nontrivial integrals at the verification
/// order. Each nontrivial integral is paired with its order-zero truncation
/// as a control.
pub fn run_verify(case: &CaseFile, export_dir: Option<&Path>) -> Result<VerifyReport> {
    let v = &case.verify;
    let l = case.lagrangian()?;
    if l.is_higher_order(v.order) {
        return Err(Error::Refused(format!(
            "{}: a perturbation depends on upp, so the equation of motion is of fourth order and no higher-order first-integral formula is available",
            case.label
        )));
    }
    let params = case.parameter_values()?;
    let spaces = solve_sequence(&l, v.order, &case.solver)?;
    let space = spaces.last().expect("nonempty");
    let trajectories = v
        .eps
        .iter()
        .map(|&eps| integrate_el(&l, v.order, eps, &params, v.u0, v.up0, v.phi_end, v.h))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (i, label) in space.labels.iter().enumerate() {
        if *label == Label::TrivialLift {
            continue;
        }
        let full = integral_of(&l, space, i)?.expect("second-order equation");
        let mut variants = vec![(v.order, full.clone())];
        if label.is_nontrivial() && v.order > 0 {
            variants.push((0, full.truncated(0)));
        }
        for (k, integral) in variants {
            let mut drifts = Vec::new();
            for (n, t) in trajectories.iter().enumerate() {
                let (d, profile) = conservation_drift(&integral, t)?;
                drifts.push(d);
                if let Some(dir) = export_dir {
                    let file = dir.join(format!("{}_g{i}_k{k}_eps{n}.tsv", case.label));
                    std::fs::write(&file, export_tsv(t, &profile)).map_err(|e| Error::Input(format!("{}: {e}", file.display())))?;
                }
            }
            let ratios: Vec<f64> = drifts.windows(2).map(|w| w[0] / w[1]).collect();
            let expected = expected_range(k);
            let status = if drifts.iter().all(|d| *d < DRIFT_FLOOR) {
                "floor"
            } else if ratios.iter().all(|r| *r >= expected.0 && *r <= expected.1) {
                "ok"
            } else {
                "outside"
            };
            rows.push(DriftRow { generator: i, label: label.name().to_string(), truncation: k, drifts, ratios, expected, status: status.into() });
        }
    }
    Ok(VerifyReport {
        header: header(case),
        order: v.order,
        eps: v.eps.clone(),
        u0: v.u0,
        up0: v.up0,
        phi_end: v.phi_end,
        h: trajectories[0].h,
        method: trajectories[0].method.to_string(),
        rows,
    })
}
