//! Graphs with cusp sectors.
//!
//! A cusped graph is a finite core with infinite rays (sectors) glued at
//! core vertices. Oriented edges carry weights; sector edge `k` (between
//! depth `k-1` and depth `k`) of sector `j` weighs `α_j^k` in both
//! directions. Walks may turn back inside a sector when they were heading
//! outward. The weighted transition operator is trace class and its traces
//! are computed exactly on finite truncations: a closed walk of length `j`
//! cannot reach depth `⌈j/2⌉`, so depth `⌈j/2⌉ + 1` already gives the exact
//! value.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclic::{self, CapExceeded};
use crate::exact::{self, ParseRationalError, Rational};
use crate::graph::{Graph, GraphDoc, GraphError};
use crate::loops::{LoopClass, LoopError};
use crate::roots::cmp_complex;
use crate::series::{self, SeriesError, TruncatedSeries};
use crate::transfer::EdgeOperator;
use crate::zeta::CheckResult;

/// Eigenvalues below this modulus are left out of the depth comparison.
pub const EIGEN_COMPARE_FLOOR: f64 = 1e-4;
pub const EIGEN_DIAGNOSTIC_TOL: f64 = 1e-8;
pub const DEFAULT_EIGEN_DEPTH: usize = 20;
pub const EIGEN_DEPTH_STEP: usize = 5;

#[derive(Debug, Error)]
pub enum CuspError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("malformed cusped-graph document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error("sector {sector}: attach vertex {attach} is not a core vertex (core has {vertex_count})")]
    AttachOutOfRange {
        sector: usize,
        attach: usize,
        vertex_count: usize,
    },
    #[error("sector {sector}: alpha = {alpha} must lie strictly between 0 and 1")]
    AlphaOutOfRange { sector: usize, alpha: String },
    #[error("{count} sector ratios given for {sectors} sectors")]
    AlphaCount { count: usize, sectors: usize },
    #[error("core weight {0} must be positive")]
    NonPositiveCoreWeight(String),
    #[error("override {index}: sector {sector} does not exist")]
    OverrideSector { index: usize, sector: usize },
    #[error("override {index}: depth must be at least 1")]
    OverrideDepth { index: usize },
    #[error("override {index}: weight {weight} must be positive")]
    OverrideWeight { index: usize, weight: String },
    #[error("override {index}: sector {sector}, depth {depth} given twice")]
    DuplicateOverride {
        index: usize,
        sector: usize,
        depth: usize,
    },
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Core graph plus the attach vertex of each sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspedGraph {
    core: Graph,
    attach: Vec<usize>,
}

impl CuspedGraph {
    pub fn new(core: Graph, attach: Vec<usize>) -> Result<Self, CuspError> {
        for (sector, &a) in attach.iter().enumerate() {
            if a >= core.vertex_count() {
                return Err(CuspError::AttachOutOfRange {
                    sector,
                    attach: a,
                    vertex_count: core.vertex_count(),
                });
            }
        }
        Ok(CuspedGraph { core, attach })
    }

    pub fn core(&self) -> &Graph {
        &self.core
    }

    pub fn attach(&self) -> &[usize] {
        &self.attach
    }

    pub fn sector_count(&self) -> usize {
        self.attach.len()
    }

    /// Vertex id of depth `k ≥ 1` on sector `j` in every truncation.
    /// Ids grow with depth, so a deeper truncation only appends edges.
    pub fn sector_vertex(&self, sector: usize, depth: usize) -> usize {
        if depth == 0 {
            return self.attach[sector];
        }
        self.core.vertex_count() + (depth - 1) * self.sector_count() + sector
    }

    /// `(sector, depth)` of a vertex id; core vertices give `None`.
    pub fn locate(&self, v: usize) -> Option<(usize, usize)> {
        let r0 = self.core.vertex_count();
        if v < r0 {
            return None;
        }
        let n = self.sector_count();
        Some(((v - r0) % n, (v - r0) / n + 1))
    }

    /// Distance to the core.
    pub fn depth_of(&self, v: usize) -> usize {
        self.locate(v).map_or(0, |(_, d)| d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightScheme {
    pub core_weight: Rational,
    pub alphas: Vec<Rational>,
    /// `(sector, depth) → weight` for individual sector edges.
    pub overrides: BTreeMap<(usize, usize), Rational>,
}

impl WeightScheme {
    /// `β` on the core, `α_j` on sector `j`, no overrides.
    pub fn new(core_weight: Rational, alphas: Vec<Rational>) -> Self {
        WeightScheme {
            core_weight,
            alphas,
            overrides: BTreeMap::new(),
        }
    }

    /// `β = 1` and `α = 1/2` on every sector.
    pub fn standard(cg: &CuspedGraph) -> Self {
        WeightScheme::new(Rational::one(), vec![exact::ratio(1, 2); cg.sector_count()])
    }

    pub fn validate(&self, cg: &CuspedGraph) -> Result<(), CuspError> {
        if !exact::is_positive(&self.core_weight) {
            return Err(CuspError::NonPositiveCoreWeight(exact::format_rational(
                &self.core_weight,
            )));
        }
        if self.alphas.len() != cg.sector_count() {
            return Err(CuspError::AlphaCount {
                count: self.alphas.len(),
                sectors: cg.sector_count(),
            });
        }
        for (sector, a) in self.alphas.iter().enumerate() {
            if !exact::is_positive(a) || *a >= Rational::one() {
                return Err(CuspError::AlphaOutOfRange {
                    sector,
                    alpha: exact::format_rational(a),
                });
            }
        }
        for (index, (&(sector, depth), w)) in self.overrides.iter().enumerate() {
            if sector >= cg.sector_count() {
                return Err(CuspError::OverrideSector { index, sector });
            }
            if depth == 0 {
                return Err(CuspError::OverrideDepth { index });
            }
            if !exact::is_positive(w) {
                return Err(CuspError::OverrideWeight {
                    index,
                    weight: exact::format_rational(w),
                });
            }
        }
        Ok(())
    }

    /// Weight of sector edge `depth` of `sector`, in either direction.
    pub fn sector_weight(&self, sector: usize, depth: usize) -> Rational {
        match self.overrides.get(&(sector, depth)) {
            Some(w) => w.clone(),
            None => num_traits::pow(self.alphas[sector].clone(), depth),
        }
    }

    /// Weight of the edge `{a, b}` (vertex ids as in [`CuspedGraph::sector_vertex`]).
    pub fn edge_weight(&self, cg: &CuspedGraph, a: usize, b: usize) -> Rational {
        let deeper = if cg.depth_of(a) >= cg.depth_of(b) { a } else { b };
        match cg.locate(deeper) {
            None => self.core_weight.clone(),
            Some((sector, depth)) => self.sector_weight(sector, depth),
        }
    }
}

/// The finite graph made of the core and the first `depth` vertices of
/// every sector, with per-oriented-edge weights.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub graph: Graph,
    pub depth: usize,
    pub vertex_depth: Vec<usize>,
    pub weights: Vec<Rational>,
}

impl Truncation {
    /// Heading away from the core.
    pub fn is_outward(&self, oriented: usize) -> bool {
        let e = self.graph.oriented_edge(oriented);
        self.vertex_depth[e.target] > self.vertex_depth[e.start]
    }

    /// `e → e'` needs `t(e) = s(e')`, and `e' = ē` only when `e` is outward.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        self.graph
            .oriented_edges()
            .into_iter()
            .map(|e| {
                let outward = self.is_outward(e.id);
                self.graph
                    .neighbors(e.target)
                    .iter()
                    .filter_map(|&c| self.graph.oriented_id(e.target, c))
                    .filter(|&f| f != e.reverse_id || outward)
                    .collect()
            })
            .collect()
    }
}

pub fn truncation(cg: &CuspedGraph, w: &WeightScheme, depth: usize) -> Truncation {
    let r0 = cg.core.vertex_count();
    let n = cg.sector_count();
    let vertex_count = r0 + depth * n;
    let mut edges: Vec<(usize, usize)> = cg.core.edges().to_vec();
    for k in 1..=depth {
        for j in 0..n {
            edges.push((cg.sector_vertex(j, k - 1), cg.sector_vertex(j, k)));
        }
    }
    let graph = Graph::new(vertex_count, edges).expect("sector rays are simple paths");
    let vertex_depth = (0..vertex_count).map(|v| cg.depth_of(v)).collect();
    let weights = graph
        .oriented_edges()
        .iter()
        .map(|e| w.edge_weight(cg, e.start, e.target))
        .collect();
    Truncation {
        graph,
        depth,
        vertex_depth,
        weights,
    }
}

/// Entry `(e', e)` is `w(e')` for every allowed transition `e → e'`.
pub fn truncated_operator(cg: &CuspedGraph, w: &WeightScheme, depth: usize) -> EdgeOperator {
    operator_of(&truncation(cg, w, depth))
}

fn operator_of(t: &Truncation) -> EdgeOperator {
    let columns = t
        .successors()
        .into_iter()
        .map(|succ| succ.into_iter().map(|f| (f, t.weights[f].clone())).collect())
        .collect();
    EdgeOperator::from_columns(columns)
}

/// One visit to a sector: leave the core, go out to `max_depth`, return.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Excursion {
    pub sector: usize,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SLoop {
    pub class: LoopClass,
    pub weight: Rational,
    /// In order along the canonical representative.
    pub excursions: Vec<Excursion>,
}

fn excursions(cg: &CuspedGraph, vertices: &[usize]) -> Vec<Excursion> {
    let n = vertices.len() - 1;
    let Some(start) = (0..n).find(|&i| cg.depth_of(vertices[i]) == 0) else {
        return Vec::new();
    };
    let mut out: Vec<Excursion> = Vec::new();
    let mut current: Option<Excursion> = None;
    for step in 0..n {
        let v = vertices[(start + step + 1) % n];
        match (cg.locate(v), current.as_mut()) {
            (Some((sector, depth)), None) => current = Some(Excursion { sector, max_depth: depth }),
            (Some((_, depth)), Some(x)) => x.max_depth = x.max_depth.max(depth),
            (None, Some(_)) => out.extend(current.take()),
            (None, None) => {}
        }
    }
    out
}

/// Rotation classes of closed walks of length `1..=max_length` that only
/// turn back inside sectors, heading outward. Sorted by length, then by
/// canonical edge sequence on the depth-`⌈max_length/2⌉` truncation.
pub fn enumerate_s_loops(
    cg: &CuspedGraph,
    w: &WeightScheme,
    max_length: usize,
    cap: usize,
) -> Result<Vec<SLoop>, CuspError> {
    let t = truncation(cg, w, max_length.div_ceil(2));
    let classes = cyclic::enumerate_cycles(&t.successors(), max_length, cap)
        .map_err(|CapExceeded { cap }| LoopError::CapExceeded { cap })?;
    Ok(classes
        .into_iter()
        .map(|c| {
            let class = LoopClass::from_edges(&t.graph, &c.edges);
            let weight = c
                .edges
                .iter()
                .fold(Rational::one(), |acc, &e| acc * &t.weights[e]);
            SLoop {
                excursions: excursions(cg, class.vertices()),
                class,
                weight,
            }
        })
        .collect())
}

/// `w(c) = ∏ w(e_i)`, recomputed from the vertex sequence.
pub fn s_loop_weight(cg: &CuspedGraph, w: &WeightScheme, c: &SLoop) -> Rational {
    c.class
        .vertices()
        .windows(2)
        .fold(Rational::one(), |acc, p| acc * w.edge_weight(cg, p[0], p[1]))
}

/// Exact traces at the smallest truncation depth that sees every closed
/// walk of the given length.
pub fn exact_depth(j: usize) -> usize {
    j.div_ceil(2) + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuspTraces {
    /// `p_1, ..., p_{n_max}`.
    pub traces: Vec<Rational>,
    /// `j` values whose trace changed between depth `D(j)` and `D(j) + 1`.
    pub unstable: Vec<usize>,
}

/// `tr T^j` at depth `D(j)`, each rechecked at `D(j) + 1`.
pub fn cusp_trace_powers(cg: &CuspedGraph, w: &WeightScheme, n_max: usize) -> CuspTraces {
    cusp_trace_powers_with_margin(cg, w, n_max, 1)
}

/// As [`cusp_trace_powers`], rechecking at depth `D(j) + margin`.
pub fn cusp_trace_powers_with_margin(
    cg: &CuspedGraph,
    w: &WeightScheme,
    n_max: usize,
    margin: usize,
) -> CuspTraces {
    // D(j) takes each value for two consecutive j; group them.
    let depths: Vec<usize> = (1..=n_max).map(exact_depth).collect();
    let max_j_at = |d: usize| (1..=n_max).filter(|&j| exact_depth(j) == d).max();
    let mut distinct = depths.clone();
    distinct.dedup();
    let per_depth: Vec<(usize, Vec<Rational>, Vec<Rational>)> = distinct
        .par_iter()
        .map(|&d| {
            let j = max_j_at(d).expect("depth comes from some j");
            let at = truncated_operator(cg, w, d).trace_powers(j);
            let deeper = if margin == 0 {
                at.clone()
            } else {
                truncated_operator(cg, w, d + margin).trace_powers(j)
            };
            (d, at, deeper)
        })
        .collect();
    let mut traces = Vec::with_capacity(n_max);
    let mut unstable = Vec::new();
    for j in 1..=n_max {
        let (_, at, deeper) = per_depth
            .iter()
            .find(|(d, _, _)| *d == exact_depth(j))
            .expect("computed above");
        if at[j - 1] != deeper[j - 1] {
            unstable.push(j);
        }
        traces.push(at[j - 1].clone());
    }
    CuspTraces { traces, unstable }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenDiagnostic {
    pub depth: usize,
    pub compare_depth: usize,
    pub floor: f64,
    /// Largest distance from an eigenvalue of modulus `≥ floor` at one depth
    /// to the nearest eigenvalue at the other.
    pub max_distance: f64,
    pub tolerance: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuspZeta {
    /// Taylor coefficients of `Z^{-1}` through `u^order`.
    pub series: TruncatedSeries,
    pub traces: CuspTraces,
    /// Eigenvalues of the depth-`depth` truncation, nonzero ones sorted by
    /// `(re, im)`.
    pub eigenvalues: Vec<Complex64>,
    /// `1/λ` for the eigenvalues above.
    pub zeros: Vec<Complex64>,
    pub diagnostic: EigenDiagnostic,
}

/// Eigenvalues of the weighted operator at `depth`, moduli below `1e-300`
/// dropped. The matrix `W^{1/2} B W^{1/2}` is similar to the operator and
/// better balanced.
pub fn truncation_eigenvalues(cg: &CuspedGraph, w: &WeightScheme, depth: usize) -> Vec<Complex64> {
    let t = truncation(cg, w, depth);
    let n = t.graph.oriented_edge_count();
    if n == 0 {
        return Vec::new();
    }
    let sqrt_w: Vec<f64> = t.weights.iter().map(|x| exact::to_f64(x).sqrt()).collect();
    let successors = t.successors();
    let mut digraph = DiGraph::<(), ()>::with_capacity(n, 0);
    let nodes: Vec<NodeIndex> = (0..n).map(|_| digraph.add_node(())).collect();
    for (e, succ) in successors.iter().enumerate() {
        for &f in succ {
            digraph.add_edge(nodes[e], nodes[f], ());
        }
    }
    // Block-triangular by components; acyclic parts contribute exact zeros
    // that dense QR would smear into spurious small eigenvalues.
    let mut eig = Vec::new();
    for comp in tarjan_scc(&digraph) {
        let idx: Vec<usize> = comp.iter().map(|v| v.index()).collect();
        let cyclic = idx.len() > 1 || successors[idx[0]].contains(&idx[0]);
        if !cyclic {
            continue;
        }
        let local: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut m = DMatrix::<f64>::zeros(idx.len(), idx.len());
        for (i, &e) in idx.iter().enumerate() {
            for f in &successors[e] {
                if let Some(&j) = local.get(f) {
                    m[(j, i)] = sqrt_w[*f] * sqrt_w[e];
                }
            }
        }
        eig.extend(block_eigenvalues(m).into_iter().filter(|z| z.norm() > 1e-300));
    }
    eig.sort_by(cmp_complex);
    eig
}

/// Same budget as LAPACK: 30 sweeps per row.
const SCHUR_ITER_PER_ROW: usize = 30;
const SCHUR_RETRIES: u64 = 4;

/// The Francis iteration here has no exceptional shifts and can stall on
/// symmetric spectra with zero diagonal. On failure, retry on `Q^T m Q` for
/// seeded random orthogonal `Q`.
fn block_eigenvalues(m: DMatrix<f64>) -> Vec<Complex64> {
    let n = m.nrows();
    let max_iter = SCHUR_ITER_PER_ROW * n.max(10);
    let extract = |schur: nalgebra::Schur<f64, nalgebra::Dyn>| {
        schur
            .complex_eigenvalues()
            .iter()
            .map(|z| Complex64::new(z.re, z.im))
            .collect::<Vec<_>>()
    };
    if let Some(schur) = m.clone().try_schur(f64::EPSILON, max_iter) {
        return extract(schur);
    }
    for seed in 0..SCHUR_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let q = g.qr().q();
        let rotated = q.transpose() * &m * &q;
        if let Some(schur) = rotated.try_schur(f64::EPSILON, max_iter) {
            return extract(schur);
        }
    }
    panic!("Schur iteration failed to converge on a {n}x{n} block")
}

fn one_sided_distance(a: &[Complex64], b: &[Complex64], floor: f64) -> f64 {
    a.iter()
        .filter(|z| z.norm() >= floor)
        .map(|z| {
            b.iter()
                .map(|y| (z - y).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn eigen_diagnostic(
    cg: &CuspedGraph,
    w: &WeightScheme,
    depth: usize,
    compare_depth: usize,
) -> (Vec<Complex64>, EigenDiagnostic) {
    let (a, b) = rayon::join(
        || truncation_eigenvalues(cg, w, depth),
        || truncation_eigenvalues(cg, w, compare_depth),
    );
    let floor = EIGEN_COMPARE_FLOOR;
    let mut max_distance = one_sided_distance(&a, &b, floor).max(one_sided_distance(&b, &a, floor));
    if max_distance.is_infinite() {
        max_distance = f64::MAX;
    }
    let diagnostic = EigenDiagnostic {
        depth,
        compare_depth,
        floor,
        max_distance,
        tolerance: EIGEN_DIAGNOSTIC_TOL,
        converged: max_distance < EIGEN_DIAGNOSTIC_TOL,
    };
    (a, diagnostic)
}

/// `Z^{-1} = exp(−Σ p_j u^j / j)` through `u^order`, plus eigenvalue data
/// from the depth-`depth` truncation (default `max(order, 20)`) compared
/// against depth `depth + 5`.
pub fn cusp_zeta_series(
    cg: &CuspedGraph,
    w: &WeightScheme,
    order: usize,
    depth: Option<usize>,
) -> Result<CuspZeta, CuspError> {
    w.validate(cg)?;
    let traces = cusp_trace_powers(cg, w, order);
    let series = series::exp_neg_trace_sum(&traces.traces, order)?;
    let depth = depth.unwrap_or(order.max(DEFAULT_EIGEN_DEPTH));
    let (eigenvalues, diagnostic) = eigen_diagnostic(cg, w, depth, depth + EIGEN_DEPTH_STEP);
    let zeros = eigenvalues.iter().map(|z| z.inv()).collect();
    Ok(CuspZeta {
        series,
        traces,
        eigenvalues,
        zeros,
        diagnostic,
    })
}

/// `∏_{prime S-loops, l ≤ order} (1 − w(p) u^{l(p)})` through `u^order`.
pub fn cusp_euler_series(
    cg: &CuspedGraph,
    w: &WeightScheme,
    order: usize,
    cap: usize,
) -> Result<TruncatedSeries, CuspError> {
    let mut acc = TruncatedSeries::one(order);
    for c in enumerate_s_loops(cg, w, order, cap)? {
        if !c.class.is_prime() {
            continue;
        }
        let mut coeffs = vec![Rational::zero(); order + 1];
        coeffs[0] = Rational::one();
        coeffs[c.class.length()] = -c.weight.clone();
        acc = &acc * &TruncatedSeries::new(order, coeffs);
    }
    Ok(acc)
}

/// `p_j = Σ_{l(c)=j} l(c_0) w(c)` over the S-loop census, `j ≤ n_max`.
pub fn cusp_trace_lemma_check(
    cg: &CuspedGraph,
    w: &WeightScheme,
    n_max: usize,
    cap: usize,
) -> Result<CheckResult, CuspError> {
    let traces = cusp_trace_powers(cg, w, n_max);
    let mut census = vec![Rational::zero(); n_max + 1];
    for c in enumerate_s_loops(cg, w, n_max, cap)? {
        census[c.class.length()] += exact::int(c.class.primitive_length() as i64) * &c.weight;
    }
    for j in 1..=n_max {
        if traces.traces[j - 1] != census[j] {
            return Ok(CheckResult::fail(format!(
                "j = {j}: p_j = {}, S-loop census = {}",
                traces.traces[j - 1],
                census[j]
            )));
        }
    }
    Ok(CheckResult::pass(format!("exact agreement for j = 1..={n_max}")))
}

/// `p_j` at depth `D(j)` against depth `D(j) + margin`.
pub fn cusp_truncation_check(
    cg: &CuspedGraph,
    w: &WeightScheme,
    n_max: usize,
    margin: usize,
) -> CheckResult {
    let t = cusp_trace_powers_with_margin(cg, w, n_max, margin);
    if t.unstable.is_empty() {
        CheckResult::pass(format!(
            "p_1..p_{n_max} unchanged between depth ceil(j/2)+1 and ceil(j/2)+{}",
            margin + 1
        ))
    } else {
        CheckResult::fail(format!("traces changed with depth for j in {:?}", t.unstable))
    }
}

pub fn cusp_euler_check(
    cg: &CuspedGraph,
    w: &WeightScheme,
    order: usize,
    cap: usize,
) -> Result<CheckResult, CuspError> {
    let traces = cusp_trace_powers(cg, w, order);
    let det_side = series::exp_neg_trace_sum(&traces.traces, order)?;
    let euler_side = cusp_euler_series(cg, w, order, cap)?;
    Ok(match det_side.first_mismatch(&euler_side) {
        None => CheckResult::pass(format!("exact agreement through u^{order}")),
        Some(k) => CheckResult::fail(format!(
            "coefficient of u^{k}: trace side {} vs Euler product {}",
            det_side.coeff(k),
            euler_side.coeff(k)
        )),
    })
}

/// On-disk form of a cusped graph with its weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuspedDoc {
    pub core: GraphDoc,
    pub sectors: Vec<SectorDoc>,
    #[serde(default)]
    pub core_weight: Option<String>,
    #[serde(default)]
    pub overrides: Vec<OverrideDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorDoc {
    pub attach: usize,
    #[serde(default)]
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideDoc {
    pub sector: usize,
    pub depth: usize,
    pub weight: String,
}

/// Parses a document; missing `core_weight` means 1 and missing `alpha`
/// means 1/2.
pub fn cusped_from_doc(doc: &CuspedDoc) -> Result<(CuspedGraph, WeightScheme), CuspError> {
    let core = Graph::from_doc(&doc.core)?;
    let cg = CuspedGraph::new(core, doc.sectors.iter().map(|s| s.attach).collect())?;
    let core_weight = match &doc.core_weight {
        Some(s) => exact::parse_rational(s)?,
        None => Rational::one(),
    };
    let alphas = doc
        .sectors
        .iter()
        .map(|s| match &s.alpha {
            Some(a) => exact::parse_rational(a),
            None => Ok(exact::ratio(1, 2)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = WeightScheme::new(core_weight, alphas);
    for (index, o) in doc.overrides.iter().enumerate() {
        let weight = exact::parse_rational(&o.weight)?;
        if w.overrides.insert((o.sector, o.depth), weight).is_some() {
            return Err(CuspError::DuplicateOverride {
                index,
                sector: o.sector,
                depth: o.depth,
            });
        }
    }
    w.validate(&cg)?;
    Ok((cg, w))
}

pub fn cusped_from_json(text: &str) -> Result<(CuspedGraph, WeightScheme), CuspError> {
    let doc: CuspedDoc =
        serde_json::from_str(text).map_err(|e| CuspError::Malformed(e.to_string()))?;
    cusped_from_doc(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::transfer::edge_operator;

    fn bare_ray() -> CuspedGraph {
        CuspedGraph::new(Graph::new(1, []).unwrap(), vec![0]).unwrap()
    }

    fn triangle_sector() -> CuspedGraph {
        CuspedGraph::new(Graph::cycle(3).unwrap(), vec![0]).unwrap()
    }

    #[test]
    fn labelling_is_stable_across_depths() {
        let cg = CuspedGraph::new(Graph::cycle(4).unwrap(), vec![0, 2]).unwrap();
        let w = WeightScheme::standard(&cg);
        let small = truncation(&cg, &w, 2);
        let large = truncation(&cg, &w, 5);
        assert_eq!(&large.graph.edges()[..small.graph.edge_count()], small.graph.edges());
        assert_eq!(cg.locate(cg.sector_vertex(1, 3)), Some((1, 3)));
        assert_eq!(cg.depth_of(2), 0);
    }

    #[test]
    fn weights() {
        let cg = triangle_sector();
        let mut w = WeightScheme::new(int(2), vec![ratio(1, 3)]);
        assert_eq!(w.edge_weight(&cg, 0, 1), int(2));
        assert_eq!(w.edge_weight(&cg, 0, cg.sector_vertex(0, 1)), ratio(1, 3));
        let (v2, v3) = (cg.sector_vertex(0, 2), cg.sector_vertex(0, 3));
        assert_eq!(w.edge_weight(&cg, v3, v2), ratio(1, 27));
        w.overrides.insert((0, 3), ratio(5, 7));
        assert_eq!(w.edge_weight(&cg, v2, v3), ratio(5, 7));
        assert!(w.validate(&cg).is_ok());
        w.alphas[0] = int(1);
        assert!(matches!(w.validate(&cg), Err(CuspError::AlphaOutOfRange { .. })));
    }

    #[test]
    fn outward_reversal_only() {
        let cg = triangle_sector();
        let t = truncation(&cg, &WeightScheme::standard(&cg), 2);
        let succ = t.successors();
        let out1 = t.graph.oriented_id(0, cg.sector_vertex(0, 1)).unwrap();
        let in1 = out1 ^ 1;
        assert!(succ[out1].contains(&in1));
        assert!(!succ[in1].contains(&out1));
        let core = t.graph.oriented_id(0, 1).unwrap();
        assert!(!succ[core].contains(&(core ^ 1)));
    }

    #[test]
    fn core_only_truncation_is_scaled_edge_operator() {
        let cg = CuspedGraph::new(Graph::complete(4), vec![1]).unwrap();
        let w = WeightScheme::new(int(3), vec![ratio(1, 2)]);
        let t = truncated_operator(&cg, &w, 0);
        let plain = edge_operator(&Graph::complete(4));
        let scaled = EdgeOperator::from_columns(
            (0..plain.dimension())
                .map(|e| plain.column(e).iter().map(|(r, v)| (*r, v * int(3))).collect())
                .collect(),
        );
        assert_eq!(t, scaled);
    }

    #[test]
    fn bare_ray_has_nothing() {
        let cg = bare_ray();
        let w = WeightScheme::standard(&cg);
        assert!(enumerate_s_loops(&cg, &w, 10, 1000).unwrap().is_empty());
        assert!(truncated_operator(&cg, &w, 3).trace_powers(8).iter().all(Zero::is_zero));
        let z = cusp_zeta_series(&cg, &w, 6, Some(6)).unwrap();
        assert_eq!(z.series, TruncatedSeries::one(6));
    }

    #[test]
    fn triangle_census() {
        let cg = triangle_sector();
        let w = WeightScheme::standard(&cg);
        let loops = enumerate_s_loops(&cg, &w, 5, 1000).unwrap();
        let summary: Vec<(usize, Rational, usize)> = loops
            .iter()
            .map(|c| (c.class.length(), c.weight.clone(), c.excursions.len()))
            .collect();
        assert_eq!(
            summary,
            vec![
                (3, int(1), 0),
                (3, int(1), 0),
                (5, ratio(1, 4), 1),
                (5, ratio(1, 4), 1)
            ]
        );
        for c in &loops {
            assert_eq!(s_loop_weight(&cg, &w, c), c.weight);
        }
        let t = truncated_operator(&cg, &w, 1).trace_powers(5);
        assert_eq!(t[2], int(6));
        assert_eq!(t[4], ratio(5, 2));
    }

    #[test]
    fn triangle_series() {
        let cg = triangle_sector();
        let w = WeightScheme::standard(&cg);
        let z = cusp_zeta_series(&cg, &w, 6, Some(8)).unwrap();
        assert_eq!(z.traces.traces[..3], [int(0), int(0), int(6)]);
        assert!(z.traces.unstable.is_empty());
        assert_eq!(z.series.coeff(3), &int(-2));
        assert_eq!(z.series.coeff(5), &ratio(-1, 2));
        assert!(cusp_euler_check(&cg, &w, 8, 100_000).unwrap().passed());
        assert!(cusp_trace_lemma_check(&cg, &w, 8, 100_000).unwrap().passed());
    }

    #[test]
    fn small_alpha_approaches_core_zeta() {
        let cg = triangle_sector();
        let w = WeightScheme::new(int(1), vec![ratio(1, 1_000_000)]);
        let z = cusp_zeta_series(&cg, &w, 6, Some(4)).unwrap();
        let core = TruncatedSeries::from_poly(&crate::zeta::zeta_inverse(cg.core()), 6);
        for k in 0..=6 {
            let diff = exact::to_f64(&(z.series.coeff(k) - core.coeff(k))).abs();
            assert!(diff < 1e-10, "k = {k}: {diff}");
        }
    }

    #[test]
    fn excursion_structure() {
        let cg = triangle_sector();
        let w = WeightScheme::standard(&cg);
        let loops = enumerate_s_loops(&cg, &w, 7, 10_000).unwrap();
        let deep = loops
            .iter()
            .find(|c| c.excursions.iter().any(|x| x.max_depth == 2))
            .expect("depth-2 excursion by length 7");
        assert_eq!(deep.class.length(), 7);
        assert_eq!(deep.weight, ratio(1, 64));
    }

    #[test]
    fn json_parsing() {
        let text = r#"{"core": {"vertices": 3, "edges": [[0,1],[1,2],[2,0]]},
                       "sectors": [{"attach": 0, "alpha": "1/3"}, {"attach": 2}],
                       "core_weight": "2",
                       "overrides": [{"sector": 1, "depth": 2, "weight": "1/9"}]}"#;
        let (cg, w) = cusped_from_json(text).unwrap();
        assert_eq!(cg.attach(), &[0, 2]);
        assert_eq!(w.alphas, vec![ratio(1, 3), ratio(1, 2)]);
        assert_eq!(w.sector_weight(1, 2), ratio(1, 9));
        let bad = r#"{"core": {"vertices": 1, "edges": []}, "sectors": [{"attach": 4}]}"#;
        assert!(matches!(cusped_from_json(bad), Err(CuspError::AttachOutOfRange { .. })));
    }

    #[test]
    fn acyclic_truncation_has_empty_spectrum() {
        let cg = bare_ray();
        let w = WeightScheme::standard(&cg);
        assert!(truncation_eigenvalues(&cg, &w, 25).is_empty());
        assert!(eigen_diagnostic(&cg, &w, 20, 25).1.converged);
    }

    #[test]
    fn bipartite_core_spectrum_is_symmetric() {
        let cg = CuspedGraph::new(Graph::cycle(4).unwrap(), vec![0, 2]).unwrap();
        let w = WeightScheme::standard(&cg);
        let eig = truncation_eigenvalues(&cg, &w, 20);
        assert_eq!(eig.len(), 88);
        for z in eig.iter().filter(|z| z.norm() >= EIGEN_COMPARE_FLOOR) {
            let nearest = eig.iter().map(|y| (y + z).norm()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-9, "{z} has no partner");
        }
    }
}
