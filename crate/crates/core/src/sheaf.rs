//! c-sheaves on graphs and their twisted zeta functions.
//!
//! A c-sheaf puts a space `V_v` on each vertex and `V_e` on each edge,
//! with maps `φ_v^e : V_v → V_e` and `ψ_e^v : V_e → V_v` for every endpoint
//! `v` of `e`, subject to `ψ_e^v φ_v^e = Id`. Crossing `e` from `u` to `v`
//! applies `T_u^v = ψ_e^v φ_u^e`. The block operator on `⊕_{e ∈ OE} V_e`
//! generalizes the edge operator and `Z_V(u)^{-1} = det(1 − uT)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{self, ParseRationalError, Rational};
use crate::graph::{Graph, GraphDoc, GraphError};
use crate::loops::{self, LoopClass, LoopError, DEFAULT_CLASS_CAP};
use crate::matrix::Matrix;
use crate::poly::ExactPoly;
use crate::series::{self, TruncatedSeries};
use crate::transfer::EdgeOperator;
use crate::zeta::CheckResult;

#[derive(Debug, Error)]
pub enum SheafError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("malformed sheaf document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error("{what}: expected {expected} entries, found {found}")]
    DimensionCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("missing {kind} map for vertex {vertex} and edge {{{a}, {b}}}")]
    MissingMap {
        kind: &'static str,
        vertex: usize,
        a: usize,
        b: usize,
    },
    #[error("{kind} map given twice for vertex {vertex} and edge {{{a}, {b}}}")]
    DuplicateMap {
        kind: &'static str,
        vertex: usize,
        a: usize,
        b: usize,
    },
    #[error("{kind} map for vertex {vertex} and edge {{{a}, {b}}}: vertex is not an endpoint of an edge of the graph")]
    NotIncident {
        kind: &'static str,
        vertex: usize,
        a: usize,
        b: usize,
    },
    #[error("{kind} map for vertex {vertex} and edge {{{a}, {b}}}: expected shape {expected:?}, found {found:?}")]
    ShapeMismatch {
        kind: &'static str,
        vertex: usize,
        a: usize,
        b: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("retraction fails at vertex {vertex}, edge {{{a}, {b}}}: psi*phi = {product}")]
    RetractionFailure {
        vertex: usize,
        a: usize,
        b: usize,
        product: String,
    },
    #[error("edge-scalar sheaf needs a nonzero scalar at vertex {vertex}, edge {{{a}, {b}}}")]
    ZeroScalar { vertex: usize, a: usize, b: usize },
    #[error("vertices {u} and {v} are not adjacent")]
    NotAdjacent { u: usize, v: usize },
    #[error("a path needs at least one vertex")]
    EmptyPath,
    #[error(transparent)]
    Loop(#[from] LoopError),
}

/// `T_u^v` or a product of them, mapping `V_source` to `V_target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMatrix {
    pub source: usize,
    pub target: usize,
    pub matrix: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CSheaf {
    graph: Graph,
    vertex_dims: Vec<usize>,
    edge_dims: Vec<usize>,
    // indexed by edge, then by endpoint side: 0 for the smaller vertex
    phi: Vec<[Matrix; 2]>,
    psi: Vec<[Matrix; 2]>,
}

type MapTable = BTreeMap<(usize, usize), Matrix>;

impl CSheaf {
    /// Structural checks only: every incident pair has both maps and every
    /// shape fits. Keys of `phi`/`psi` are `(vertex, edge index)`; edge
    /// indices and `edge_dims` follow [`Graph::edges`]. The retraction
    /// identity is checked by [`validate_csheaf`].
    pub fn new(
        graph: Graph,
        vertex_dims: Vec<usize>,
        edge_dims: Vec<usize>,
        mut phi: MapTable,
        mut psi: MapTable,
    ) -> Result<Self, SheafError> {
        if vertex_dims.len() != graph.vertex_count() {
            return Err(SheafError::DimensionCount {
                what: "vertex_dims",
                expected: graph.vertex_count(),
                found: vertex_dims.len(),
            });
        }
        if edge_dims.len() != graph.edge_count() {
            return Err(SheafError::DimensionCount {
                what: "edge_dims",
                expected: graph.edge_count(),
                found: edge_dims.len(),
            });
        }
        for (kind, table) in [("phi", &phi), ("psi", &psi)] {
            for &(v, e) in table.keys() {
                let incident = graph
                    .edges()
                    .get(e)
                    .is_some_and(|&(a, b)| a == v || b == v);
                if !incident {
                    let (a, b) = graph.edges().get(e).copied().unwrap_or((v, v));
                    return Err(SheafError::NotIncident {
                        kind,
                        vertex: v,
                        a,
                        b,
                    });
                }
            }
        }
        let take = |kind: &'static str, table: &mut MapTable, e: usize, v: usize| {
            let (a, b) = graph.edges()[e];
            let m = table.remove(&(v, e)).ok_or(SheafError::MissingMap {
                kind,
                vertex: v,
                a,
                b,
            })?;
            let expected = if kind == "phi" {
                (edge_dims[e], vertex_dims[v])
            } else {
                (vertex_dims[v], edge_dims[e])
            };
            if m.shape() != expected {
                return Err(SheafError::ShapeMismatch {
                    kind,
                    vertex: v,
                    a,
                    b,
                    expected,
                    found: m.shape(),
                });
            }
            Ok(m)
        };
        let mut phi_by_edge = Vec::with_capacity(graph.edge_count());
        let mut psi_by_edge = Vec::with_capacity(graph.edge_count());
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            phi_by_edge.push([take("phi", &mut phi, e, a)?, take("phi", &mut phi, e, b)?]);
            psi_by_edge.push([take("psi", &mut psi, e, a)?, take("psi", &mut psi, e, b)?]);
        }
        Ok(CSheaf {
            graph,
            vertex_dims,
            edge_dims,
            phi: phi_by_edge,
            psi: psi_by_edge,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_dims(&self) -> &[usize] {
        &self.vertex_dims
    }

    pub fn edge_dims(&self) -> &[usize] {
        &self.edge_dims
    }

    fn side(&self, v: usize, e: usize) -> usize {
        let (a, b) = self.graph.edges()[e];
        debug_assert!(v == a || v == b);
        usize::from(v != a)
    }

    /// `φ_v^e`, shape `d_e × d_v`.
    pub fn phi(&self, v: usize, e: usize) -> &Matrix {
        &self.phi[e][self.side(v, e)]
    }

    /// `ψ_e^v`, shape `d_v × d_e`.
    pub fn psi(&self, e: usize, v: usize) -> &Matrix {
        &self.psi[e][self.side(v, e)]
    }

    /// `Σ_{e ∈ OE} d_e`, the size of the block operator.
    pub fn block_dimension(&self) -> usize {
        2 * self.edge_dims.iter().sum::<usize>()
    }

    /// Row offset of each oriented edge's block.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.graph.oriented_edge_count() + 1);
        let mut acc = 0;
        offsets.push(0);
        for id in 0..self.graph.oriented_edge_count() {
            acc += self.edge_dims[id / 2];
            offsets.push(acc);
        }
        offsets
    }

    pub fn from_doc(doc: &SheafDoc) -> Result<Self, SheafError> {
        let graph = Graph::from_doc(&doc.graph)?;
        if doc.edge_dims.len() != doc.graph.edges.len() {
            return Err(SheafError::DimensionCount {
                what: "edge_dims",
                expected: doc.graph.edges.len(),
                found: doc.edge_dims.len(),
            });
        }
        let mut edge_dims = vec![0; graph.edge_count()];
        for (&[a, b], &d) in doc.graph.edges.iter().zip(&doc.edge_dims) {
            edge_dims[graph.edge_index(a, b).expect("edge from the same document")] = d;
        }
        let read = |kind: &'static str, entries: &[MapDoc]| -> Result<MapTable, SheafError> {
            let mut table = MapTable::new();
            for m in entries {
                let [a, b] = m.e;
                let (lo, hi) = (a.min(b), a.max(b));
                let not_incident = SheafError::NotIncident {
                    kind,
                    vertex: m.v,
                    a: lo,
                    b: hi,
                };
                let e = graph.edge_index(a, b).ok_or(not_incident)?;
                if m.v != a && m.v != b {
                    return Err(SheafError::NotIncident {
                        kind,
                        vertex: m.v,
                        a: lo,
                        b: hi,
                    });
                }
                let rows = Matrix::parse(&m.matrix)?;
                let expected_cols = if kind == "phi" {
                    doc.vertex_dims.get(m.v).copied().unwrap_or(0)
                } else {
                    edge_dims[e]
                };
                let cols = rows.first().map_or(expected_cols, Vec::len);
                let matrix = Matrix::from_rows(rows, cols).ok_or_else(|| {
                    SheafError::Malformed(format!(
                        "{kind} map for vertex {} and edge {{{lo}, {hi}}} has ragged rows",
                        m.v
                    ))
                })?;
                if table.insert((m.v, e), matrix).is_some() {
                    return Err(SheafError::DuplicateMap {
                        kind,
                        vertex: m.v,
                        a: lo,
                        b: hi,
                    });
                }
            }
            Ok(table)
        };
        let phi = read("phi", &doc.phi)?;
        let psi = read("psi", &doc.psi)?;
        CSheaf::new(graph, doc.vertex_dims.clone(), edge_dims, phi, psi)
    }

    /// Parses and structurally checks a sheaf document. Retraction is not
    /// checked here.
    pub fn from_json(text: &str) -> Result<Self, SheafError> {
        let doc: SheafDoc =
            serde_json::from_str(text).map_err(|e| SheafError::Malformed(e.to_string()))?;
        CSheaf::from_doc(&doc)
    }

    pub fn to_doc(&self) -> SheafDoc {
        let mut phi = Vec::new();
        let mut psi = Vec::new();
        for (e, &(a, b)) in self.graph.edges().iter().enumerate() {
            for v in [a, b] {
                phi.push(MapDoc {
                    v,
                    e: [a, b],
                    matrix: self.phi(v, e).to_strings(),
                });
                psi.push(MapDoc {
                    v,
                    e: [a, b],
                    matrix: self.psi(e, v).to_strings(),
                });
            }
        }
        SheafDoc {
            graph: self.graph.to_doc(),
            vertex_dims: self.vertex_dims.clone(),
            edge_dims: self.edge_dims.clone(),
            phi,
            psi,
        }
    }
}

/// On-disk form. `edge_dims` follows the order of `graph.edges`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafDoc {
    pub graph: GraphDoc,
    pub vertex_dims: Vec<usize>,
    pub edge_dims: Vec<usize>,
    pub phi: Vec<MapDoc>,
    pub psi: Vec<MapDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub v: usize,
    pub e: [usize; 2],
    pub matrix: Vec<Vec<String>>,
}

/// Checks `ψ_e^v φ_v^e = Id` for every edge and endpoint, in edge order.
pub fn validate_csheaf(s: &CSheaf) -> Result<(), SheafError> {
    for (e, &(a, b)) in s.graph.edges().iter().enumerate() {
        for v in [a, b] {
            let product = s.psi(e, v) * s.phi(v, e);
            if !product.is_identity() {
                return Err(SheafError::RetractionFailure {
                    vertex: v,
                    a,
                    b,
                    product: product.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// `T_u^v = ψ_e^v φ_u^e` for the edge `e = {u, v}`.
pub fn transfer_map(s: &CSheaf, u: usize, v: usize) -> Result<TransferMatrix, SheafError> {
    let e = s
        .graph
        .edge_index(u, v)
        .ok_or(SheafError::NotAdjacent { u, v })?;
    Ok(TransferMatrix {
        source: u,
        target: v,
        matrix: s.psi(e, v) * s.phi(u, e),
    })
}

/// `T_p = T_{v_{n-1}}^{v_n} ⋯ T_{v_0}^{v_1}` for `p = (v_0, ..., v_n)`.
pub fn path_transfer(s: &CSheaf, vertices: &[usize]) -> Result<TransferMatrix, SheafError> {
    let &first = vertices.first().ok_or(SheafError::EmptyPath)?;
    if first >= s.graph.vertex_count() {
        return Err(SheafError::NotAdjacent { u: first, v: first });
    }
    let mut acc = Matrix::identity(s.vertex_dims[first]);
    for w in vertices.windows(2) {
        let step = transfer_map(s, w[0], w[1])?;
        acc = &step.matrix * &acc;
    }
    Ok(TransferMatrix {
        source: first,
        target: *vertices.last().expect("nonempty"),
        matrix: acc,
    })
}

/// `tr T_c^j`, read from the canonical representative of `c`.
pub fn loop_trace(s: &CSheaf, c: &LoopClass, j: usize) -> Result<Rational, SheafError> {
    Ok(path_transfer(s, c.vertices())?.matrix.pow(j).trace())
}

/// Block `(e', e)` is `φ_{t(e)}^{e'} ψ_e^{t(e)}` when `t(e) = s(e')` and
/// `e' ≠ ē`.
pub fn block_operator(s: &CSheaf) -> EdgeOperator {
    let g = &s.graph;
    let offsets = s.block_offsets();
    let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); s.block_dimension()];
    for e in g.oriented_edges() {
        let t = e.target;
        let out_of = s.psi(e.underlying, t);
        for &c in g.neighbors(t) {
            let f = g.oriented_id(t, c).expect("neighbour");
            if f == e.reverse_id {
                continue;
            }
            let block = s.phi(t, f / 2) * out_of;
            for col in 0..block.cols() {
                for row in 0..block.rows() {
                    let x = &block[(row, col)];
                    if !x.is_zero() {
                        columns[offsets[e.id] + col].push((offsets[f] + row, x.clone()));
                    }
                }
            }
        }
    }
    EdgeOperator::from_columns(columns)
}

/// `Z_V(u)^{-1} = det(1 − uT)` over the block operator.
pub fn sheaf_zeta_inverse(s: &CSheaf) -> ExactPoly {
    let t = block_operator(s);
    let d = t.dimension();
    series::det_one_minus_ut(&t.trace_powers(d), d).expect("d traces for dimension d")
}

/// `det(1 − x M)` as a polynomial in `x`.
fn det_one_minus_x(m: &Matrix) -> ExactPoly {
    let d = m.rows();
    series::det_one_minus_ut(&m.trace_powers(d), d).expect("d traces for dimension d")
}

/// `∏_{c_0 prime, l(c_0) ≤ order} det(1 − u^{l(c_0)} T_{c_0})` truncated
/// after `u^order`.
pub fn sheaf_euler_series(
    s: &CSheaf,
    order: usize,
    cap: usize,
) -> Result<TruncatedSeries, SheafError> {
    let mut acc = TruncatedSeries::one(order);
    for c in loops::prime_loops_capped(&s.graph, order, cap)? {
        let l = c.length();
        let local = det_one_minus_x(&path_transfer(s, c.vertices())?.matrix);
        let mut coeffs = vec![Rational::zero(); order + 1];
        for (k, a) in local.coeffs().iter().enumerate() {
            if k * l > order {
                break;
            }
            coeffs[k * l] = a.clone();
        }
        acc = &acc * &TruncatedSeries::new(order, coeffs);
    }
    Ok(acc)
}

/// `tr T^n = Σ_{l(c)=n} l(c_0) tr T_c` for `n = 1..=n_max`, exactly.
pub fn sheaf_trace_identity_check(
    s: &CSheaf,
    n_max: usize,
    cap: usize,
) -> Result<CheckResult, SheafError> {
    let traces = block_operator(s).trace_powers(n_max);
    let mut census = vec![Rational::zero(); n_max + 1];
    for c in loops::enumerate_loops_capped(&s.graph, n_max, cap)? {
        census[c.length()] += exact::int(c.primitive_length() as i64) * loop_trace(s, &c, 1)?;
    }
    for n in 1..=n_max {
        if traces[n - 1] != census[n] {
            return Ok(CheckResult::fail(format!(
                "n = {n}: tr T^n = {}, loop side = {}",
                traces[n - 1],
                census[n]
            )));
        }
    }
    Ok(CheckResult::pass(format!("exact agreement for n = 1..={n_max}")))
}

/// Determinant side against the Euler product through `u^order`.
pub fn sheaf_euler_check(s: &CSheaf, order: usize, cap: usize) -> Result<CheckResult, SheafError> {
    let det_side = TruncatedSeries::from_poly(&sheaf_zeta_inverse(s), order);
    let euler_side = sheaf_euler_series(s, order, cap)?;
    Ok(match det_side.first_mismatch(&euler_side) {
        None => CheckResult::pass(format!("exact agreement through u^{order}")),
        Some(k) => CheckResult::fail(format!(
            "coefficient of u^{k}: determinant {} vs Euler product {}",
            det_side.coeff(k),
            euler_side.coeff(k)
        )),
    })
}

/// Every stalk `Q^r`, every map the identity.
pub fn constant_sheaf(g: &Graph, r: usize) -> CSheaf {
    let mut phi = MapTable::new();
    let mut psi = MapTable::new();
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        for v in [a, b] {
            phi.insert((v, e), Matrix::identity(r));
            psi.insert((v, e), Matrix::identity(r));
        }
    }
    CSheaf::new(
        g.clone(),
        vec![r; g.vertex_count()],
        vec![r; g.edge_count()],
        phi,
        psi,
    )
    .expect("constant sheaf is well formed")
}

/// Rank-1 sheaf with `φ_v^e = c` and `ψ_e^v = 1/c`; pairs absent from
/// `scalars` (keyed by `(vertex, edge index)`) get `c = 1`.
pub fn edge_scalar_sheaf(
    g: &Graph,
    scalars: &BTreeMap<(usize, usize), Rational>,
) -> Result<CSheaf, SheafError> {
    let mut phi = MapTable::new();
    let mut psi = MapTable::new();
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        for v in [a, b] {
            let c = scalars.get(&(v, e)).cloned().unwrap_or_else(Rational::one);
            if c.is_zero() {
                return Err(SheafError::ZeroScalar { vertex: v, a, b });
            }
            psi.insert((v, e), Matrix::scalar(c.recip()));
            phi.insert((v, e), Matrix::scalar(c));
        }
    }
    for &(v, e) in scalars.keys() {
        if !phi.contains_key(&(v, e)) {
            let (a, b) = g.edges().get(e).copied().unwrap_or((v, v));
            return Err(SheafError::NotIncident {
                kind: "phi",
                vertex: v,
                a,
                b,
            });
        }
    }
    CSheaf::new(
        g.clone(),
        vec![1; g.vertex_count()],
        vec![1; g.edge_count()],
        phi,
        psi,
    )
}

/// Default truncation for [`sheaf_euler_check`] and the trace identity.
pub const DEFAULT_SHEAF_ORDER: usize = 10;

/// Runs both sheaf checks with the default loop cap.
pub fn sheaf_checks(s: &CSheaf, order: usize) -> Result<BTreeMap<String, CheckResult>, SheafError> {
    let mut checks = BTreeMap::new();
    checks.insert(
        "euler_product".to_string(),
        sheaf_euler_check(s, order, DEFAULT_CLASS_CAP)?,
    );
    checks.insert(
        "trace_identity".to_string(),
        sheaf_trace_identity_check(s, order, DEFAULT_CLASS_CAP)?,
    );
    Ok(checks)
}
