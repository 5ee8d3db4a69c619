//! Solution, conditions and verification reports with text and JSON output.

use std::fmt::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parameter {
    pub name: String,
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ansatz {
    pub basis_p: u32,
    pub basis_m: u32,
    pub basis_functions: Vec<String>,
    pub u_min: i32,
    pub u_max: i32,
    pub deg_xi: u32,
    pub deg_eta: u32,
    pub deg_gauge: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub case: String,
    pub description: String,
    pub lagrangian: String,
    pub perturbations: Vec<String>,
    pub parameters: Vec<Parameter>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JetCoefficient {
    pub jet: String,
    pub coefficient: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionsReport {
    pub header: Header,
    pub order: usize,
    pub generator: String,
    pub residual: String,
    pub by_jet: Vec<JetCoefficient>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorReport {
    pub index: usize,
    pub label: String,
    pub xi: Vec<String>,
    pub eta: Vec<String>,
    pub gauge: Vec<String>,
    pub integral: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extension {
    pub generator: usize,
    pub extends: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub order: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub dimension: usize,
    pub nontrivial: usize,
    pub new_nontrivial: usize,
    pub trivial_lifts: usize,
    pub extensions: Vec<Extension>,
    pub generators: Vec<GeneratorReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub header: Header,
    pub ansatz: Ansatz,
    pub orders: Vec<OrderReport>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftRow {
    pub generator: usize,
    pub label: String,
    pub truncation: usize,
    pub drifts: Vec<f64>,
    pub ratios: Vec<f64>,
    pub expected: (f64, f64),
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub header: Header,
    pub order: usize,
    pub eps: Vec<f64>,
    pub u0: f64,
    pub up0: f64,
    pub phi_end: f64,
    pub h: f64,
    pub method: String,
    pub rows: Vec<DriftRow>,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn header_text(out: &mut String, h: &Header) {
    let _ = writeln!(out, "case: {}", h.case);
    if !h.description.is_empty() {
        let _ = writeln!(out, "description: {}", h.description);
    }
    let _ = writeln!(out, "L = {}", h.lagrangian);
    for (i, g) in h.perturbations.iter().enumerate() {
        let _ = writeln!(out, "G{} = {}", i + 1, g);
    }
    if !h.parameters.is_empty() {
        let ps: Vec<String> = h
            .parameters
            .iter()
            .map(|p| match &p.value {
                Some(v) => format!("{} = {}", p.name, v),
                None => p.name.clone(),
            })
            .collect();
        let _ = writeln!(out, "parameters: {}", ps.join(", "));
    }
}

impl ConditionsReport {
    pub fn render(&self, format: Format) -> String {
        if format == Format::Machine {
            return json(self);
        }
        let mut out = String::new();
        header_text(&mut out, &self.header);
        let _ = writeln!(out, "order: {}", self.order);
        let _ = writeln!(out, "generator: {}", self.generator);
        let _ = writeln!(out, "residual:");
        if self.by_jet.is_empty() {
            let _ = writeln!(out, "  0");
        }
        for j in &self.by_jet {
            let _ = writeln!(out, "  [{}] {}", j.jet, j.coefficient);
        }
        out
    }
}

fn fmt_e(x: f64) -> String {
    format!("{x:.4e}")
}

impl SolveReport {
    pub fn render(&self, format: Format) -> String {
        if format == Format::Machine {
            return json(self);
        }
        let mut out = String::new();
        header_text(&mut out, &self.header);
        let a = &self.ansatz;
        let _ = writeln!(
            out,
            "ansatz: phi basis p <= {}, m <= {} ({} functions); u powers {}..{}; u degrees xi {}, eta {}, gauge {}",
            a.basis_p,
            a.basis_m,
            a.basis_functions.len(),
            a.u_min,
            a.u_max,
            a.deg_xi,
            a.deg_eta,
            a.deg_gauge
        );
        for o in &self.orders {
            let _ = writeln!(out);
            let _ = writeln!(out, "order {}", o.order);
            let _ = writeln!(out, "  unknowns {}, equations {}, solution dimension {}", o.unknowns, o.equations, o.dimension);
            let _ = writeln!(out, "  trivial lifts: {}", o.trivial_lifts);
            let _ = writeln!(out, "  nontrivial: {} (new at this order: {})", o.nontrivial, o.new_nontrivial);
            for e in &o.extensions {
                let verb = if e.extends { "extends" } else { "does not extend" };
                let _ = writeln!(out, "  order-{} generator {} {verb}", o.order - 1, e.generator);
            }
            if o.order > 0 && o.new_nontrivial == 0 {
                let _ = writeln!(out, "  no new nontrivial approximate symmetry at order {}", o.order);
            }
            for g in o.generators.iter().filter(|g| g.label != "trivial-lift") {
                let _ = writeln!(out, "  generator {} ({})", g.index, g.label);
                for j in 0..g.xi.len() {
                    let _ = writeln!(out, "    xi{j} = {}", g.xi[j]);
                    let _ = writeln!(out, "    eta{j} = {}", g.eta[j]);
                    let _ = writeln!(out, "    A{j} = {}", g.gauge[j]);
                }
                if let Some(parts) = &g.integral {
                    for (j, p) in parts.iter().enumerate() {
                        let _ = writeln!(out, "    I{j} = {p}");
                    }
                }
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(out);
            for n in &self.notes {
                let _ = writeln!(out, "note: {n}");
            }
        }
        out
    }
}

impl VerifyReport {
    pub fn render(&self, format: Format) -> String {
        if format == Format::Machine {
            return json(self);
        }
        let mut out = String::new();
        header_text(&mut out, &self.header);
        let eps: Vec<String> = self.eps.iter().map(|e| fmt_e(*e)).collect();
        let _ = writeln!(out, "order: {}", self.order);
        let _ = writeln!(out, "eps: {}", eps.join(", "));
        let _ = writeln!(
            out,
            "u(0) = {}, up(0) = {}, phi in [0, {:.6}], h = {}, method {}",
            self.u0, self.up0, self.phi_end, fmt_e(self.h), self.method
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "generator  label                 truncation  drifts  ratios  expected  status");
        for r in &self.rows {
            let d: Vec<String> = r.drifts.iter().map(|x| fmt_e(*x)).collect();
            let q: Vec<String> = r.ratios.iter().map(|x| format!("{x:.3}")).collect();
            let _ = writeln!(
                out,
                "{:<10} {:<21} {:<11} {}  {}  [{}, {}]  {}",
                r.generator,
                r.label,
                r.truncation,
                d.join(" "),
                q.join(" "),
                r.expected.0,
                r.expected.1,
                r.status
            );
        }
        out
    }
}
