use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::noether_approx::case::CaseFile;
use ::noether_approx::cli::{self, Overrides};
use ::noether_approx::expr::{self, Symbol};
use ::noether_approx::report::{Format, SolveReport, VerifyReport};
use ::noether_approx::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Input(_) | Error::Expr(_) | Error::BasisOverflow { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn format(name: &str) -> PyResult<Format> {
    match name {
        "text" => Ok(Format::Text),
        "machine" => Ok(Format::Machine),
        _ => Err(PyValueError::new_err(format!("unknown format `{name}`, expected text or machine"))),
    }
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<PyObject> {
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

/// An exact expression in `phi`, the jets `u, up, upp, ...` and parameters.
#[pyclass(name = "Expr", frozen)]
#[derive(Clone)]
struct PyExpr {
    inner: expr::Expr,
}

#[pymethods]
impl PyExpr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyExpr { inner: expr::parse(text).map_err(|e| to_py(e.into()))? })
    }

    /// Partial derivative with respect to `phi`, a jet or a parameter.
    fn diff(&self, symbol: &str) -> Self {
        let s = Symbol::reserved(symbol).unwrap_or_else(|| Symbol::param(symbol));
        PyExpr { inner: self.inner.diff(&s) }
    }

    fn total_derivative(&self) -> Self {
        PyExpr { inner: self.inner.total_derivative() }
    }

    fn eval(&self, values: HashMap<String, f64>) -> PyResult<f64> {
        let env = values.into_iter().map(|(k, v)| (Symbol::reserved(&k).unwrap_or_else(|| Symbol::param(k)), v)).collect();
        self.inner.eval(&env).map_err(|e| to_py(e.into()))
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __add__(&self, other: &PyExpr) -> Self {
        PyExpr { inner: &self.inner + &other.inner }
    }

    fn __sub__(&self, other: &PyExpr) -> Self {
        PyExpr { inner: &self.inner - &other.inner }
    }

    fn __mul__(&self, other: &PyExpr) -> Self {
        PyExpr { inner: &self.inner * &other.inner }
    }

    fn __eq__(&self, other: &PyExpr) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.inner)
    }
}

/// A perturbed Lagrangian with solver and verification settings.
#[pyclass(name = "Case")]
#[derive(Clone)]
struct PyCase {
    inner: CaseFile,
}

#[pymethods]
impl PyCase {
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        cli::builtin(name).map(|inner| PyCase { inner }).ok_or_else(|| PyValueError::new_err(format!("no built-in case `{name}`")))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyCase { inner: CaseFile::parse(text).map_err(to_py)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyCase { inner: cli::load_case(path).map_err(to_py)? })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn perturbations(&self) -> Vec<PyExpr> {
        self.inner.g.iter().map(|g| PyExpr { inner: g.clone() }).collect()
    }

    #[getter]
    fn parameters(&self) -> Vec<(String, Option<String>)> {
        self.inner.parameters.iter().map(|(n, v)| (n.clone(), v.as_ref().map(|q| q.to_string()))).collect()
    }

    /// Same case with parameters fixed to exact values such as `"5/4"`.
    fn specialize(&self, values: HashMap<String, String>) -> PyResult<Self> {
        let mut set = values.into_iter().map(|(k, v)| cli::parse_assignment(&format!("{k}={v}"))).collect::<Result<Vec<_>, _>>().map_err(to_py)?;
        set.sort_by(|a, b| a.0.cmp(&b.0));
        let o = Overrides { set, ..Default::default() };
        Ok(PyCase { inner: o.apply(&self.inner).map_err(to_py)? })
    }

    #[pyo3(signature = (basis_p=None, basis_m=None, u_min=None, u_max=None, deg_xi=None, deg_eta=None, deg_gauge=None))]
    #[allow(clippy::too_many_arguments)]
    fn with_ansatz(
        &self,
        basis_p: Option<u32>,
        basis_m: Option<u32>,
        u_min: Option<i32>,
        u_max: Option<i32>,
        deg_xi: Option<u32>,
        deg_eta: Option<u32>,
        deg_gauge: Option<u32>,
    ) -> PyResult<Self> {
        let o = Overrides { basis_p, basis_m, u_min, u_max, deg_xi, deg_eta, deg_gauge, set: vec![] };
        Ok(PyCase { inner: o.apply(&self.inner).map_err(to_py)? })
    }

    #[pyo3(signature = (order=1, format="text"))]
    fn conditions(&self, order: usize, format: &str) -> PyResult<String> {
        Ok(cli::run_conditions(&self.inner, order).map_err(to_py)?.render(self::format(format)?))
    }

    #[pyo3(signature = (order=None))]
    fn solve(&self, order: Option<usize>) -> PyResult<Solution> {
        let order = order.unwrap_or_else(|| self.inner.default_order());
        Ok(Solution { report: cli::run_solve(&self.inner, order).map_err(to_py)? })
    }

    fn verify(&self) -> PyResult<Verification> {
        Ok(Verification { report: cli::run_verify(&self.inner, None).map_err(to_py)? })
    }
}

/// Classified generators, gauges and first integrals through some order.
#[pyclass(frozen)]
struct Solution {
    report: SolveReport,
}

#[pymethods]
impl Solution {
    /// Nontrivial generators first appearing at each order.
    fn new_nontrivial(&self) -> Vec<usize> {
        self.report.orders.iter().map(|o| o.new_nontrivial).collect()
    }

    fn nontrivial(&self) -> Vec<usize> {
        self.report.orders.iter().map(|o| o.nontrivial).collect()
    }

    /// Nontrivial first integrals at the highest order, as lists of parts.
    fn integrals(&self) -> Vec<Vec<PyExpr>> {
        let last = self.report.orders.last().expect("order zero is always present");
        last.generators
            .iter()
            .filter(|g| g.label.starts_with("nontrivial"))
            .filter_map(|g| g.integral.as_ref())
            .map(|parts| parts.iter().map(|p| PyExpr { inner: expr::parse(p).expect("printed expressions parse") }).collect())
            .collect()
    }

    #[pyo3(signature = (format="text"))]
    fn report(&self, format: &str) -> PyResult<String> {
        Ok(self.report.render(self::format(format)?))
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<PyObject> {
        json_to_py(py, &self.report.render(Format::Machine))
    }
}

/// Drift table of first integrals along integrated trajectories.
#[pyclass(frozen)]
struct Verification {
    report: VerifyReport,
}

#[pymethods]
impl Verification {
    /// `(generator, label, truncation, drifts, ratios, status)` per row.
    #[allow(clippy::type_complexity)]
    fn rows(&self) -> Vec<(usize, String, usize, Vec<f64>, Vec<f64>, String)> {
        self.report
            .rows
            .iter()
            .map(|r| (r.generator, r.label.clone(), r.truncation, r.drifts.clone(), r.ratios.clone(), r.status.clone()))
            .collect()
    }

    #[pyo3(signature = (format="text"))]
    fn report(&self, format: &str) -> PyResult<String> {
        Ok(self.report.render(self::format(format)?))
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<PyObject> {
        json_to_py(py, &self.report.render(Format::Machine))
    }
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PyExpr> {
    PyExpr::new(text)
}

#[pyfunction]
fn list_builtins() -> Vec<&'static str> {
    cli::BUILTINS.iter().map(|(n, _)| *n).collect()
}

#[pymodule]
#[pyo3(name = "noether_approx")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpr>()?;
    m.add_class::<PyCase>()?;
    m.add_class::<Solution>()?;
    m.add_class::<Verification>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(list_builtins, m)?)?;
    Ok(())
}
