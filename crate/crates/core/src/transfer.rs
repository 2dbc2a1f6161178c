//! The non-backtracking oriented-edge operator `T` and traces of its powers.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::{self, Rational};
use crate::graph::{Graph, OrientedEdge};

/// Square exact matrix stored by columns: `columns[e]` holds the nonzero
/// entries `(e', T[e'][e])` for the allowed transitions `e -> e'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOperator {
    columns: Vec<Vec<(usize, Rational)>>,
}

impl EdgeOperator {
    /// Entries are sorted by row within each column; duplicate rows add up.
    pub fn from_columns(mut columns: Vec<Vec<(usize, Rational)>>) -> Self {
        for col in &mut columns {
            col.sort_by_key(|(row, _)| *row);
            let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(col.len());
            for (row, value) in col.drain(..) {
                match merged.last_mut() {
                    Some((r, v)) if *r == row => *v += value,
                    _ => merged.push((row, value)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            *col = merged;
        }
        EdgeOperator { columns }
    }

    pub fn dimension(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, e: usize) -> &[(usize, Rational)] {
        &self.columns[e]
    }

    pub fn entry(&self, row: usize, col: usize) -> Rational {
        self.columns[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn nonzero_count(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let n = self.dimension();
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                rows[*r][c] = v.clone();
            }
        }
        rows
    }

    pub fn to_dense_f64(&self) -> Vec<Vec<f64>> {
        let n = self.dimension();
        let mut rows = vec![vec![0.0; n]; n];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                rows[*r][c] = exact::to_f64(v);
            }
        }
        rows
    }

    fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); x.len()];
        for (c, xc) in x.iter().enumerate() {
            if xc.is_zero() {
                continue;
            }
            for (r, v) in &self.columns[c] {
                y[*r] += v * xc;
            }
        }
        y
    }

    /// `tr T^k` for `k = 1..=n_max`, exactly.
    ///
    /// Each basis vector is pushed through `T` `n_max` times and its own
    /// coordinate read off; columns run in parallel and are summed in order.
    pub fn trace_powers(&self, n_max: usize) -> Vec<Rational> {
        let per_column: Vec<Vec<Rational>> = (0..self.dimension())
            .into_par_iter()
            .map(|e| {
                let mut x = vec![Rational::zero(); self.dimension()];
                x[e] = Rational::one();
                let mut diag = Vec::with_capacity(n_max);
                for _ in 0..n_max {
                    x = self.apply(&x);
                    diag.push(x[e].clone());
                }
                diag
            })
            .collect();
        let mut traces = vec![Rational::zero(); n_max];
        for diag in per_column {
            for (t, d) in traces.iter_mut().zip(diag) {
                *t += d;
            }
        }
        traces
    }
}

/// `T[e'][e] = 1` iff `target(e) = start(e')` and `e' ≠ reverse(e)`.
pub fn edge_operator(g: &Graph) -> EdgeOperator {
    let columns = g
        .oriented_edges()
        .into_iter()
        .map(|e| {
            g.neighbors(e.target)
                .iter()
                .filter_map(|&c| g.oriented_id(e.target, c))
                .filter(|&f| f != e.reverse_id)
                .map(|f| (f, Rational::one()))
                .collect()
        })
        .collect();
    EdgeOperator::from_columns(columns)
}

pub fn trace_powers(t: &EdgeOperator, n_max: usize) -> Vec<Rational> {
    t.trace_powers(n_max)
}

/// JSON dump for the `dump-operator` subcommand.
#[derive(Debug, Serialize)]
pub struct OperatorDump {
    pub dimension: usize,
    pub oriented_edges: Vec<OrientedEdge>,
    pub entries: Vec<Vec<String>>,
}

pub fn dump_operator(g: &Graph) -> OperatorDump {
    let t = edge_operator(g);
    OperatorDump {
        dimension: t.dimension(),
        oriented_edges: g.oriented_edges(),
        entries: t
            .to_dense()
            .iter()
            .map(|row| row.iter().map(exact::format_rational).collect())
            .collect(),
    }
}
