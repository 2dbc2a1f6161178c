//! Python bindings. Exact values cross the boundary as `fractions.Fraction`,
//! report documents as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;

use ihara::cusp;
use ihara::loops::{self, LoopRecord};
use ihara::report::{self, ReportError, RunOptions, VerifySelection, EXIT_CAP};
use ihara::sheaf;
use ihara::{exact, Rational};

fn to_py_err(e: ReportError) -> PyErr {
    if e.exit_code() == EXIT_CAP {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fractions<'py>(py: Python<'py>, values: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let fraction = PyModule::import(py, "fractions")?.getattr("Fraction")?;
    let items = values
        .iter()
        .map(|v| fraction.call1((exact::format_rational(v),)))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, doc: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(doc).map_err(value_err)?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn options(order: Option<usize>, cap: Option<usize>) -> RunOptions {
    let mut opts = RunOptions {
        order,
        ..RunOptions::default()
    };
    if let Some(c) = cap {
        opts.cap = c;
    }
    opts
}

/// A finite simple graph on vertices `0..vertices`.
#[pyclass(name = "Graph", frozen, module = "pyihara")]
struct PyGraph {
    inner: ihara::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = ihara::Graph::new(vertices, edges).map_err(value_err)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = ihara::Graph::from_json(text).map_err(value_err)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        Ok(PyGraph {
            inner: ihara::Graph::cycle(n).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        PyGraph {
            inner: ihara::Graph::complete(n),
        }
    }

    #[staticmethod]
    fn complete_bipartite(a: usize, b: usize) -> Self {
        PyGraph {
            inner: ihara::Graph::complete_bipartite(a, b),
        }
    }

    #[staticmethod]
    fn petersen() -> Self {
        PyGraph {
            inner: ihara::Graph::petersen(),
        }
    }

    #[staticmethod]
    fn random_regular(n: usize, degree: usize, seed: u64) -> PyResult<Self> {
        Ok(PyGraph {
            inner: ihara::Graph::random_regular(n, degree, seed).map_err(value_err)?,
        })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    /// `None` unless the graph is regular of valency at least 1.
    fn branching(&self) -> Option<usize> {
        self.inner.branching()
    }

    fn disjoint_union(&self, other: &PyGraph) -> Self {
        PyGraph {
            inner: self.inner.disjoint_union(&other.inner),
        }
    }

    /// Coefficients of `det(1 - uT)`, lowest degree first.
    fn zeta_inverse<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fractions(py, ihara::zeta_inverse(&self.inner).coeffs())
    }

    /// `tr T^n` for `n = 1..=n_max`.
    fn trace_powers<'py>(&self, py: Python<'py>, n_max: usize) -> PyResult<Bound<'py, PyList>> {
        fractions(py, &ihara::edge_operator(&self.inner).trace_powers(n_max))
    }

    /// Euler product over prime loops, through `u^order`.
    #[pyo3(signature = (order, cap=None))]
    fn euler_product<'py>(
        &self,
        py: Python<'py>,
        order: usize,
        cap: Option<usize>,
    ) -> PyResult<Bound<'py, PyList>> {
        let s = loops::euler_product_series_capped(
            &self.inner,
            order,
            cap.unwrap_or(loops::DEFAULT_CLASS_CAP),
        )
        .map_err(|e| to_py_err(e.into()))?;
        fractions(py, s.coeffs())
    }

    /// Loops of length `<= max_length` as dicts.
    #[pyo3(signature = (max_length, cap=None))]
    fn loops<'py>(
        &self,
        py: Python<'py>,
        max_length: usize,
        cap: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let all = loops::enumerate_loops_capped(
            &self.inner,
            max_length,
            cap.unwrap_or(loops::DEFAULT_CLASS_CAP),
        )
        .map_err(|e| to_py_err(e.into()))?;
        let records: Vec<LoopRecord> = all.iter().map(LoopRecord::from).collect();
        to_dict(py, &records)
    }

    /// Full report: coefficients, square-free factors, poles, checks.
    #[pyo3(signature = (order=None))]
    fn report<'py>(&self, py: Python<'py>, order: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let r = report::compute(&self.inner, &options(order, None)).map_err(to_py_err)?;
        to_dict(py, &r)
    }

    fn poles<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &report::poles(&self.inner).map_err(to_py_err)?)
    }

    /// Runs all applicable identity checks.
    #[pyo3(signature = (order=None))]
    fn verify<'py>(&self, py: Python<'py>, order: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let doc = report::verify(&self.inner, VerifySelection::default(), &options(order, None))
            .map_err(to_py_err)?;
        to_dict(py, &doc)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_doc()).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(vertices={}, edges={})",
            self.inner.vertex_count(),
            self.inner.edge_count()
        )
    }
}

/// A c-sheaf on a graph.
#[pyclass(name = "Sheaf", frozen, module = "pyihara")]
struct PySheaf {
    inner: sheaf::CSheaf,
}

#[pymethods]
impl PySheaf {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySheaf {
            inner: sheaf::CSheaf::from_json(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn constant(graph: &PyGraph, rank: usize) -> Self {
        PySheaf {
            inner: sheaf::constant_sheaf(&graph.inner, rank),
        }
    }

    /// Raises `ValueError` at the first failing retraction.
    fn validate(&self) -> PyResult<()> {
        sheaf::validate_csheaf(&self.inner).map_err(value_err)
    }

    #[getter]
    fn block_dimension(&self) -> usize {
        self.inner.block_dimension()
    }

    fn zeta_inverse<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fractions(py, sheaf::sheaf_zeta_inverse(&self.inner).coeffs())
    }

    #[pyo3(signature = (order=None))]
    fn report<'py>(&self, py: Python<'py>, order: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let r = report::sheaf_report(&self.inner, &options(order, None)).map_err(to_py_err)?;
        to_dict(py, &r)
    }
}

/// A core graph with cusp sectors and its weights.
#[pyclass(name = "CuspedGraph", frozen, module = "pyihara")]
struct PyCusped {
    graph: cusp::CuspedGraph,
    weights: cusp::WeightScheme,
}

#[pymethods]
impl PyCusped {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (graph, weights) = cusp::cusped_from_json(text).map_err(value_err)?;
        Ok(PyCusped { graph, weights })
    }

    /// `p_1, ..., p_n_max`, exact.
    fn traces<'py>(&self, py: Python<'py>, n_max: usize) -> PyResult<Bound<'py, PyList>> {
        fractions(py, &cusp::cusp_trace_powers(&self.graph, &self.weights, n_max).traces)
    }

    /// Taylor coefficients of `Z^{-1}` through `u^order`.
    fn zeta_inverse_series<'py>(&self, py: Python<'py>, order: usize) -> PyResult<Bound<'py, PyList>> {
        let traces = cusp::cusp_trace_powers(&self.graph, &self.weights, order);
        let s = ihara::series::exp_neg_trace_sum(&traces.traces, order).map_err(value_err)?;
        fractions(py, s.coeffs())
    }

    #[pyo3(signature = (order=None, depth=None))]
    fn report<'py>(
        &self,
        py: Python<'py>,
        order: Option<usize>,
        depth: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut opts = options(order, None);
        opts.depth = depth;
        let r = report::cusped_report(&self.graph, &self.weights, &opts).map_err(to_py_err)?;
        to_dict(py, &r)
    }
}

#[pymodule]
fn pyihara(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySheaf>()?;
    m.add_class::<PyCusped>()?;
    Ok(())
}
