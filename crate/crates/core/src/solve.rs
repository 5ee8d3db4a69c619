//! Order-by-order solution of the approximate Noether conditions.
//!
//! Coordinates of a generator through order `k`: order zero holds
//! `(c1..c5, g0)` over the exact basis and gauge constant. Every order
//! `j >= 1` holds a block `(rest..., t1..t5, g_j)`: `rest` are the ansatz
//! coefficients of `xi_j`, `eta_j`, `A_j` over `u^n * basis`, and `t_h`, `g_j`
//! add `X0^h` with its gauge slice and a constant gauge. Five `rest`
//! coordinates (and the constant of `A_j`) are dropped so that this is a
//! change of coordinates; the trivial lifts `eps^j X0^h` then become
//! coordinate vectors.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Basis, Expr, Monomial, Rational, Symbol, Trig};
use crate::linalg::{self, Row};
use crate::noether::{free_lagrangian, noether_action, ApproxGenerator, ExactBasis, GaugeTerm, PerturbedLagrangian};
use crate::separate::DeterminingSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Slot {
    Xi,
    Eta,
    Gauge,
}

impl Slot {
    fn name(self) -> &'static str {
        match self {
            Slot::Xi => "xi",
            Slot::Eta => "eta",
            Slot::Gauge => "gauge",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub basis: Basis,
    pub u_range: (i32, i32),
    pub deg_xi: u32,
    pub deg_eta: u32,
    pub deg_gauge: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { basis: Basis::default(), u_range: (-4, 6), deg_xi: 1, deg_eta: 3, deg_gauge: 3 }
    }
}

/// Ansatz coordinates shared by every order `j >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub basis: Basis,
    pub rest: Vec<(Slot, u32, usize)>,
}

pub const ORDER0_LEN: usize = 6;

fn sanitize(name: &str) -> String {
    name.chars().filter(|c| c.is_ascii_alphanumeric()).collect()
}

impl Layout {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        if cfg.basis.m_max < 2 || cfg.deg_eta < 1 || cfg.deg_gauge < 2 {
            return Err(Error::Input(
                "the ansatz must contain the exact generators: need basis m >= 2, eta degree >= 1, gauge degree >= 2".into(),
            ));
        }
        if cfg.u_range.0 > 0 || cfg.u_range.1 < cfg.deg_gauge as i32 + 3 {
            return Err(Error::Input("u-power range must contain 0 and reach the gauge degree plus 3".into()));
        }
        let b = cfg.basis;
        let anchors: BTreeSet<(Slot, u32, usize)> = [
            (Slot::Xi, 0, b.index_of(0, None)),
            (Slot::Xi, 0, b.index_of(0, Some(Trig::sin(2)))),
            (Slot::Xi, 0, b.index_of(0, Some(Trig::cos(2)))),
            (Slot::Eta, 0, b.index_of(0, Some(Trig::sin(1)))),
            (Slot::Eta, 0, b.index_of(0, Some(Trig::cos(1)))),
            (Slot::Gauge, 0, b.index_of(0, None)),
        ]
        .into_iter()
        .map(|(s, n, i)| (s, n, i.expect("basis contains the anchors")))
        .collect();
        let mut rest = Vec::new();
        for (slot, deg) in [(Slot::Xi, cfg.deg_xi), (Slot::Eta, cfg.deg_eta), (Slot::Gauge, cfg.deg_gauge)] {
            for n in 0..=deg {
                for e in 0..b.len() {
                    if !anchors.contains(&(slot, n, e)) {
                        rest.push((slot, n, e));
                    }
                }
            }
        }
        Ok(Layout { basis: b, rest })
    }

    pub fn block_len(&self) -> usize {
        self.rest.len() + ORDER0_LEN
    }

    /// First coordinate of order `j`.
    pub fn offset(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            ORDER0_LEN + (j - 1) * self.block_len()
        }
    }

    /// Number of coordinates through order `k`.
    pub fn dim(&self, k: usize) -> usize {
        self.offset(k + 1)
    }

    pub fn block_names(&self, j: usize) -> Vec<String> {
        let names = self.basis.names();
        let mut out: Vec<String> =
            self.rest.iter().map(|(s, n, e)| format!("{}{j}_u{n}_{}", s.name(), sanitize(&names[*e]))).collect();
        out.extend((1..=5).map(|h| format!("t{j}_{h}")));
        out.push(format!("g{j}"));
        out
    }

    /// Global indices of the `rest` coordinates at orders `from..=to`.
    pub fn rest_indices(&self, from: usize, to: usize) -> Vec<usize> {
        (from.max(1)..=to).flat_map(|j| (0..self.rest.len()).map(move |r| self.offset(j) + r)).collect()
    }

    /// Global indices of the order-zero `c1..c5`.
    pub fn exact_indices(&self) -> std::ops::Range<usize> {
        0..5
    }

    /// `(xi, eta, A)` of one order-`j >= 1` block.
    pub fn block_exprs(&self, w: &[Expr]) -> (Expr, Expr, Expr) {
        let elems = self.basis.elements();
        let mut parts = [Expr::zero(), Expr::zero(), Expr::zero()];
        for ((slot, n, e), c) in self.rest.iter().zip(w) {
            if c.is_zero() {
                continue;
            }
            let u = Monomial::from_parts(vec![(Symbol::u(), *n as i32)], None);
            let f = elems[*e].to_expr().mul_monomial(&u, &Rational::from_integer(1.into()));
            parts[*slot as usize] += &(c * &f);
        }
        let tail = &w[self.rest.len()..];
        let (xi, eta, a) = exact_exprs(tail);
        let [x, y, z] = parts;
        (&x + &xi, &y + &eta, &z + &a)
    }

    /// Generator and gauge encoded by coordinates `v` through order `k`.
    pub fn decode(&self, v: &[Expr], k: usize) -> (ApproxGenerator, GaugeTerm) {
        let order0: [Expr; 5] = std::array::from_fn(|h| v[h].clone());
        let mut gauge = GaugeTerm::exact(&order0, &v[5]);
        let mut corrections = Vec::new();
        for j in 1..=k {
            let w = &v[self.offset(j)..self.offset(j + 1)];
            let (xi, eta, a) = self.block_exprs(w);
            corrections.push((xi, eta));
            gauge.parts.push(a);
        }
        (ApproxGenerator { order0, corrections }, gauge)
    }

    /// `eps * v`: coordinates of order `j` move to order `j + 1`.
    pub fn shift(&self, v: &[Expr], k: usize) -> Vec<Expr> {
        let mut out = vec![Expr::zero(); self.dim(k + 1)];
        let t = self.offset(1) + self.rest.len();
        out[t..t + ORDER0_LEN].clone_from_slice(&v[0..ORDER0_LEN]);
        for j in 1..=k {
            let (src, dst) = (self.offset(j), self.offset(j + 1));
            out[dst..dst + self.block_len()].clone_from_slice(&v[src..src + self.block_len()]);
        }
        out
    }
}

/// `(xi, eta, A)` for `(c1..c5, c6)`.
fn exact_exprs(c: &[Expr]) -> (Expr, Expr, Expr) {
    let arr: [Expr; 5] = std::array::from_fn(|h| c[h].clone());
    ExactBasis::new().combine(&arr, &c[5])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    /// Nonzero order-zero part and no corrections beyond exact generators.
    Exact,
    /// `eps^j` times a combination of exact generators, a pure gauge constant,
    /// or `eps` times a solution of the previous order.
    TrivialLift,
    /// `new` marks generators whose first non-exact correction is at this order.
    Nontrivial { new: bool },
}

impl Label {
    pub fn name(&self) -> &'static str {
        match self {
            Label::Exact => "exact",
            Label::TrivialLift => "trivial-lift",
            Label::Nontrivial { new: true } => "nontrivial",
            Label::Nontrivial { new: false } => "nontrivial-preserved",
        }
    }

    pub fn is_nontrivial(&self) -> bool {
        matches!(self, Label::Nontrivial { .. })
    }
}

/// Basis of all solutions through order `k`, classified.
#[derive(Debug, Clone)]
pub struct SolutionSpace {
    pub order: usize,
    pub config: SolverConfig,
    pub layout: Layout,
    pub vectors: Vec<Vec<Expr>>,
    pub labels: Vec<Label>,
    /// `dim V3 - dim V2`: nontrivial generators first appearing at this order.
    pub new_nontrivial: usize,
    /// For each nontrivial vector of the previous order: whether it extends.
    pub extends: Vec<(usize, bool)>,
    pub unknowns: usize,
    pub equations: usize,
}

impl SolutionSpace {
    /// All of `(c1..c5, g0)`: the exact algebra with its gauge constant.
    pub fn exact(config: &SolverConfig) -> Result<Self> {
        let layout = Layout::new(config)?;
        let vectors: Vec<Vec<Expr>> = (0..ORDER0_LEN)
            .map(|i| (0..ORDER0_LEN).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect())
            .collect();
        let mut labels = vec![Label::Exact; 5];
        labels.push(Label::TrivialLift);
        Ok(SolutionSpace {
            order: 0,
            config: config.clone(),
            layout,
            vectors,
            labels,
            new_nontrivial: 0,
            extends: vec![],
            unknowns: ORDER0_LEN,
            equations: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = (usize, &Vec<Expr>)> {
        self.vectors.iter().enumerate().filter(move |(i, _)| self.labels[*i].is_nontrivial())
    }

    pub fn nontrivial_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_nontrivial()).count()
    }

    pub fn decode(&self, i: usize) -> (ApproxGenerator, GaugeTerm) {
        self.layout.decode(&self.vectors[i], self.order)
    }
}

/// Residual contribution of every order-`j` block coordinate (same for all `j`).
fn block_columns(layout: &Layout) -> Vec<Expr> {
    let l0 = free_lagrangian();
    let n = layout.block_len();
    (0..n)
        .map(|i| {
            let mut w = vec![Expr::zero(); n];
            w[i] = Expr::one();
            let (xi, eta, a) = layout.block_exprs(&w);
            &noether_action(&xi, &eta, &l0) - &a.total_derivative()
        })
        .collect()
}

fn combine(vectors: &[Vec<Expr>], coeffs: &[Expr], len: usize) -> Vec<Expr> {
    let mut out = vec![Expr::zero(); len];
    for (v, c) in vectors.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            if !x.is_zero() {
                *o += &(c * x);
            }
        }
    }
    out
}

/// Combinations of `vectors` whose coordinates at `zero_at` vanish.
fn sub_combinations(vectors: &[Vec<Expr>], zero_at: &[usize], len: usize) -> Vec<Vec<Expr>> {
    let rows: Vec<Row> = zero_at
        .iter()
        .map(|&r| vectors.iter().enumerate().filter(|(_, v)| !v[r].is_zero()).map(|(i, v)| (i, v[r].clone())).collect())
        .collect();
    let ech = linalg::row_reduce(rows, vectors.len());
    ech.nullspace()
        .into_iter()
        .map(|y| {
            let mut v = combine(vectors, &y, len);
            linalg::normalize_vector(&mut v);
            v
        })
        .collect()
}

/// Reduces `v` against an echelon so that its pivot coordinates vanish.
fn reduce(v: &mut Vec<Expr>, ech: &linalg::Echelon) {
    for (c, row) in &ech.rows {
        if v[*c].is_zero() {
            continue;
        }
        let p = &row[c];
        let a = v[*c].clone();
        for x in v.iter_mut() {
            *x = &*x * p;
        }
        for (j, r) in row {
            v[*j] -= &(&a * r);
        }
    }
    linalg::normalize_vector(v);
}

fn to_rows(vectors: &[Vec<Expr>]) -> Vec<Row> {
    vectors
        .iter()
        .map(|v| v.iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(i, e)| (i, e.clone())).collect())
        .collect()
}

/// Solves the order-`k` conditions given the solutions through order `k - 1`.
pub fn solve_order(l: &PerturbedLagrangian, prior: &SolutionSpace, k: usize) -> Result<SolutionSpace> {
    assert_eq!(prior.order + 1, k, "orders must be solved sequentially");
    let layout = prior.layout.clone();
    let config = prior.config.clone();

    let mut names: Vec<String> = (0..prior.dim()).map(|i| format!("lambda{i}")).collect();
    let mut columns: Vec<Expr> = Vec::new();
    for s in &prior.vectors {
        let (x, _) = layout.decode(s, k - 1);
        let mut col = Expr::zero();
        for j in 0..k {
            let (xi, eta) = x.part(j);
            col += &noether_action(&xi, &eta, &l.g(k - j));
        }
        columns.push(col);
    }
    names.extend(layout.block_names(k));
    columns.extend(block_columns(&layout));

    let system = DeterminingSystem::from_columns(names, &columns, config.basis, config.u_range)?;
    let rows = system.deduplicated_rows();
    let ncols = columns.len();
    let ech = linalg::row_reduce(rows.clone(), ncols);
    let len = layout.dim(k);
    let lam = prior.dim();
    let lifted: Vec<Vec<Expr>> = ech
        .nullspace()
        .into_iter()
        .map(|y| {
            let mut v = combine(&prior.vectors, &y[..lam], layout.dim(k - 1));
            v.extend(y[lam..].iter().cloned());
            debug_assert_eq!(v.len(), len);
            linalg::normalize_vector(&mut v);
            v
        })
        .collect();

    let extends = prior
        .nontrivial()
        .map(|(i, _)| {
            let proj: Vec<Vec<Expr>> = ech.nullspace().into_iter().map(|y| y[..lam].to_vec()).collect();
            let mut e = vec![Expr::zero(); lam];
            e[i] = Expr::one();
            (i, linalg::in_span(&proj, &e))
        })
        .collect();

    let (vectors, labels, new_nontrivial) = classify(&layout, &prior.vectors, lifted, k);
    Ok(SolutionSpace {
        order: k,
        config,
        layout,
        vectors,
        labels,
        new_nontrivial,
        extends,
        unknowns: ncols,
        equations: rows.len(),
    })
}

/// Splits a basis of `S_k` along `V1 = S ∩ Triv ⊂ V2 = V1 + eps S_{k-1} ⊂ V3 = V2 + K_k ⊂ S`
/// where `K_k` holds the solutions without non-exact corrections below order `k`.
fn classify(layout: &Layout, prior: &[Vec<Expr>], space: Vec<Vec<Expr>>, k: usize) -> (Vec<Vec<Expr>>, Vec<Label>, usize) {
    let len = layout.dim(k);
    let v1 = sub_combinations(&space, &layout.rest_indices(1, k), len);
    let shifted: Vec<Vec<Expr>> = prior.iter().map(|v| layout.shift(v, k - 1)).collect();
    let kk = if k == 1 { space.clone() } else { sub_combinations(&space, &layout.rest_indices(1, k - 1), len) };

    let mut chosen: Vec<Vec<Expr>> = Vec::new();
    let mut labels = Vec::new();
    let mut group_dims = Vec::new();
    let groups: [(Vec<Vec<Expr>>, u8); 4] = [(v1, 0), (shifted, 1), (kk, 2), (space, 3)];
    for (cands, g) in groups {
        for c in cands {
            let mut trial = chosen.clone();
            trial.push(c.clone());
            if linalg::rank(&trial) > chosen.len() {
                let label = match g {
                    0 if layout.exact_indices().any(|i| !c[i].is_zero()) => Label::Exact,
                    0 | 1 => Label::TrivialLift,
                    2 => Label::Nontrivial { new: true },
                    _ => Label::Nontrivial { new: false },
                };
                chosen.push(c);
                labels.push(label);
            }
        }
        group_dims.push(chosen.len());
    }
    let new_nontrivial = group_dims[2] - group_dims[1];

    // canonical representatives: new generators modulo V2, preserved ones modulo V3
    let trivial_count = group_dims[1];
    let ech2 = linalg::row_reduce(to_rows(&chosen[..trivial_count]), len);
    for v in chosen[trivial_count..group_dims[2]].iter_mut() {
        reduce(v, &ech2);
    }
    if group_dims[2] > trivial_count {
        let ech_new = linalg::row_reduce(to_rows(&chosen[trivial_count..group_dims[2]]), len);
        let news: Vec<Vec<Expr>> = ech_new
            .rows
            .iter()
            .map(|(_, r)| {
                let mut v = vec![Expr::zero(); len];
                for (j, x) in r {
                    v[*j] = x.clone();
                }
                linalg::normalize_vector(&mut v);
                v
            })
            .collect();
        chosen[trivial_count..group_dims[2]].clone_from_slice(&news);
    }
    let ech3 = linalg::row_reduce(to_rows(&chosen[..group_dims[2]]), len);
    for v in chosen[group_dims[2]..].iter_mut() {
        reduce(v, &ech3);
    }
    for v in chosen.iter_mut() {
        linalg::make_monic(v);
    }
    (chosen, labels, new_nontrivial)
}

/// Solves orders `0..=max_order` sequentially.
pub fn solve_sequence(l: &PerturbedLagrangian, max_order: usize, config: &SolverConfig) -> Result<Vec<SolutionSpace>> {
    let mut out = vec![SolutionSpace::exact(config)?];
    for k in 1..=max_order {
        let next = solve_order(l, out.last().expect("nonempty"), k)?;
        out.push(next);
    }
    Ok(out)
}

/// Independent order-zero solve with a fully general ansatz for
/// `(xi, eta, A)`; returns a basis of solutions.
pub fn solve_exact_ansatz(config: &SolverConfig) -> Result<Vec<(Expr, Expr, Expr)>> {
    let basis = config.basis;
    let elems = basis.elements();
    let l0 = free_lagrangian();
    let mut coords: Vec<(Slot, u32, usize)> = Vec::new();
    for (slot, deg) in [(Slot::Xi, config.deg_xi), (Slot::Eta, config.deg_eta), (Slot::Gauge, config.deg_gauge)] {
        for n in 0..=deg {
            coords.extend((0..elems.len()).map(|e| (slot, n, e)));
        }
    }
    let names = basis.names();
    let term = |n: u32, e: usize| {
        elems[e].to_expr().mul_monomial(&Monomial::from_parts(vec![(Symbol::u(), n as i32)], None), &Rational::from_integer(1.into()))
    };
    let columns: Vec<Expr> = coords
        .iter()
        .map(|&(slot, n, e)| {
            let f = term(n, e);
            match slot {
                Slot::Xi => noether_action(&f, &Expr::zero(), &l0),
                Slot::Eta => noether_action(&Expr::zero(), &f, &l0),
                Slot::Gauge => -f.total_derivative(),
            }
        })
        .collect();
    let unknowns = coords.iter().map(|(s, n, e)| format!("{}0_u{n}_{}", s.name(), sanitize(&names[*e]))).collect();
    let system = DeterminingSystem::from_columns(unknowns, &columns, basis, config.u_range)?;
    let ech = linalg::row_reduce(system.deduplicated_rows(), coords.len());
    Ok(ech
        .nullspace()
        .into_iter()
        .map(|y| {
            let mut parts = [Expr::zero(), Expr::zero(), Expr::zero()];
            for ((slot, n, e), c) in coords.iter().zip(&y) {
                if !c.is_zero() {
                    parts[*slot as usize] += &(c * &term(*n, *e));
                }
            }
            let [a, b, c] = parts;
            (a, b, c)
        })
        .collect())
}

/// Coordinates of the generator parts `(xi_j, eta_j)` keyed by order, slot
/// and `(phi, u)` monomial; parameters stay in the values.
fn generator_key_map(parts: &[(Expr, Expr)]) -> BTreeMap<(usize, u8, Monomial), Expr> {
    let mut out: BTreeMap<(usize, u8, Monomial), Expr> = BTreeMap::new();
    for (j, (xi, eta)) in parts.iter().enumerate() {
        for (slot, e) in [(0u8, xi), (1u8, eta)] {
            for (m, q) in e.terms() {
                let key = m.filtered(|s| !matches!(s, Symbol::Param(_)), true);
                let coeff = m.filtered(|s| matches!(s, Symbol::Param(_)), false);
                out.entry((j, slot, key)).or_default().add_term(coeff, q.clone());
            }
        }
    }
    out
}

/// Whether the generator `target` lies in the span of `basis`, comparing
/// `(xi_j, eta_j)` for every order. Gauge terms are ignored.
pub fn generator_span_contains(basis: &[Vec<(Expr, Expr)>], target: &[(Expr, Expr)]) -> bool {
    let maps: Vec<_> = basis.iter().map(|b| generator_key_map(b)).collect();
    let tmap = generator_key_map(target);
    let keys: BTreeSet<_> = maps.iter().flat_map(|m| m.keys().cloned()).chain(tmap.keys().cloned()).collect();
    let dense = |m: &BTreeMap<(usize, u8, Monomial), Expr>| -> Vec<Expr> {
        keys.iter().map(|k| m.get(k).cloned().unwrap_or_default()).collect()
    };
    let vecs: Vec<Vec<Expr>> = maps.iter().map(dense).collect();
    linalg::in_span(&vecs, &dense(&tmap))
}

/// `(xi_j, eta_j)` for `j = 0..=k` of a solution vector.
pub fn generator_parts(space: &SolutionSpace, i: usize) -> Vec<(Expr, Expr)> {
    let (x, _) = space.decode(i);
    (0..=space.order).map(|j| x.part(j)).collect()
}
