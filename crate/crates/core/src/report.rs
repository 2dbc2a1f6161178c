//! Report documents behind the `zeta` command-line tool.
//!
//! Every document is built from deterministic computations (fixed seeds,
//! sorted outputs, in-order reductions), so equal inputs serialize to equal
//! bytes. Exact values appear as `"p/q"` strings; floats only in pole
//! coordinates and diagnostics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::cusp::{self, CuspError, CuspedGraph, EigenDiagnostic, Excursion, WeightScheme};
use crate::exact::{self, Rational};
use crate::graph::{Graph, GraphError};
use crate::loops::{self, LoopError, LoopRecord};
use crate::poly::ExactPoly;
use crate::roots::RootError;
use crate::sheaf::{self, CSheaf, SheafError};
use crate::transfer::{self, OperatorDump};
use crate::zeta::{self, CheckResult, PoleRecord, ReportOptions, ZetaError, ZetaReport};

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

pub const DEFAULT_VERIFY_ORDER: usize = 12;
pub const DEFAULT_LOOP_LENGTH: usize = 8;
pub const DEFAULT_CUSP_ORDER: usize = 10;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Cusp(#[from] CuspError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error("{0}")]
    Invalid(String),
}

fn is_cap(e: &LoopError) -> bool {
    matches!(e, LoopError::CapExceeded { .. })
}

impl ReportError {
    /// 3 for resource caps, 1 for numeric failures, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Loop(e)
            | ReportError::Zeta(ZetaError::Loop(e))
            | ReportError::Sheaf(SheafError::Loop(e))
            | ReportError::Cusp(CuspError::Loop(e))
                if is_cap(e) =>
            {
                EXIT_CAP
            }
            ReportError::Zeta(ZetaError::Root(RootError::NoConvergence { .. })) => {
                EXIT_CHECK_FAILED
            }
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub order: Option<usize>,
    pub max_length: Option<usize>,
    pub depth: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            order: None,
            max_length: None,
            depth: None,
            tol: zeta::DEFAULT_CROSS_TOL,
            seed: zeta::DEFAULT_SEED,
            cap: loops::DEFAULT_CLASS_CAP,
        }
    }
}

impl RunOptions {
    fn report_options(&self) -> ReportOptions {
        ReportOptions {
            lefschetz_order: self.order.unwrap_or(ReportOptions::default().lefschetz_order),
            tol: self.tol,
            seed: self.seed,
            sample_count: zeta::DEFAULT_SAMPLE_COUNT,
            cap: self.cap,
        }
    }
}

/// Serializes with two-space indentation and a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report types serialize");
    s.push('\n');
    s
}

pub fn compute(g: &Graph, opts: &RunOptions) -> Result<ZetaReport, ReportError> {
    Ok(zeta::full_report(g, &opts.report_options())?)
}

#[derive(Debug, Clone, Serialize)]
pub struct PolesDoc {
    pub q: Option<usize>,
    pub degree: usize,
    pub poles: Vec<PoleRecord>,
}

pub fn poles(g: &Graph) -> Result<PolesDoc, ReportError> {
    let r = zeta::pole_report(g)?;
    Ok(PolesDoc {
        q: r.q,
        degree: r.degree,
        poles: r.poles,
    })
}

fn csv_cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// `u_re,u_im,multiplicity,lambda_re,lambda_im,exceptional,on_critical_circle`;
/// the λ-side cells are empty for irregular graphs.
pub fn poles_csv(poles: &[PoleRecord]) -> String {
    let mut out = String::from("u_re,u_im,multiplicity,lambda_re,lambda_im,exceptional,on_critical_circle\n");
    for p in poles {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.u_re,
            p.u_im,
            p.multiplicity,
            csv_cell(p.lambda_re),
            csv_cell(p.lambda_im),
            csv_cell(p.exceptional),
            csv_cell(p.on_critical_circle)
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopsDoc {
    pub max_length: usize,
    pub loop_count: usize,
    /// Prime loops of length `1..=max_length`.
    pub prime_counts: Vec<usize>,
    pub loops: Vec<LoopRecord>,
}

pub fn loops(g: &Graph, opts: &RunOptions) -> Result<LoopsDoc, ReportError> {
    let max_length = opts.max_length.unwrap_or(DEFAULT_LOOP_LENGTH);
    let all = loops::enumerate_loops_capped(g, max_length, opts.cap)?;
    let primes: Vec<_> = all.iter().filter(|c| c.is_prime()).cloned().collect();
    Ok(LoopsDoc {
        max_length,
        loop_count: all.len(),
        prime_counts: loops::prime_counts(&primes, max_length)[1..].to_vec(),
        loops: all.iter().map(LoopRecord::from).collect(),
    })
}

/// Which identities `verify` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifySelection {
    pub euler: bool,
    pub traces: bool,
    pub lefschetz: bool,
    pub funceq: bool,
}

impl VerifySelection {
    pub fn is_empty(&self) -> bool {
        !(self.euler || self.traces || self.lefschetz || self.funceq)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyDoc {
    pub order: usize,
    pub tol: f64,
    pub seed: u64,
    pub checks: BTreeMap<String, CheckResult>,
}

impl VerifyDoc {
    pub fn any_failed(&self) -> bool {
        self.checks.values().any(CheckResult::failed)
    }
}

fn inapplicable(e: &ZetaError) -> bool {
    matches!(
        e,
        ZetaError::NotRegular | ZetaError::NotConnected | ZetaError::BranchingTooSmall { .. }
    )
}

/// Runs the selected checks. An empty selection runs all four and marks
/// those whose preconditions fail as skipped; an explicit selection turns
/// an unmet precondition into an error.
pub fn verify(g: &Graph, sel: VerifySelection, opts: &RunOptions) -> Result<VerifyDoc, ReportError> {
    let explicit = !sel.is_empty();
    let sel = if explicit {
        sel
    } else {
        VerifySelection {
            euler: true,
            traces: true,
            lefschetz: true,
            funceq: true,
        }
    };
    let order = opts.order.unwrap_or(DEFAULT_VERIFY_ORDER);
    let mut checks = BTreeMap::new();
    let mut record = |name: &str, r: Result<CheckResult, ZetaError>| -> Result<(), ReportError> {
        let c = match r {
            Ok(c) => c,
            Err(e) if !explicit && inapplicable(&e) => CheckResult::skipped(e.to_string()),
            Err(e) => return Err(e.into()),
        };
        checks.insert(name.to_string(), c);
        Ok(())
    };
    if sel.euler {
        record("euler", zeta::euler_vs_det_check_capped(g, order, opts.cap))?;
    }
    if sel.traces {
        record("traces", zeta::trace_identity_check_capped(g, order, opts.cap))?;
    }
    if sel.lefschetz {
        record("lefschetz", zeta::lefschetz_check(g, order, opts.tol))?;
    }
    if sel.funceq {
        let samples = zeta::admissible_samples(g, opts.seed, zeta::DEFAULT_SAMPLE_COUNT);
        record("funceq", zeta::functional_equation_check(g, &samples, opts.tol))?;
    }
    Ok(VerifyDoc {
        order,
        tol: opts.tol,
        seed: opts.seed,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SheafReport {
    pub block_dimension: usize,
    pub zeta_inverse_coeffs: ExactPoly,
    pub order: usize,
    pub checks: BTreeMap<String, CheckResult>,
}

impl SheafReport {
    pub fn any_failed(&self) -> bool {
        self.checks.values().any(CheckResult::failed)
    }
}

/// Validates the retraction identity first; a violation is an input error.
pub fn sheaf_report(s: &CSheaf, opts: &RunOptions) -> Result<SheafReport, ReportError> {
    sheaf::validate_csheaf(s)?;
    let order = opts.order.unwrap_or(sheaf::DEFAULT_SHEAF_ORDER);
    let mut checks = BTreeMap::new();
    checks.insert("retraction".to_string(), CheckResult::pass("psi * phi = Id at every incident pair"));
    checks.insert(
        "euler_product".to_string(),
        sheaf::sheaf_euler_check(s, order, opts.cap)?,
    );
    checks.insert(
        "trace_identity".to_string(),
        sheaf::sheaf_trace_identity_check(s, order, opts.cap)?,
    );
    Ok(SheafReport {
        block_dimension: s.block_dimension(),
        zeta_inverse_coeffs: sheaf::sheaf_zeta_inverse(s),
        order,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<&Complex64> for ComplexRecord {
    fn from(z: &Complex64) -> Self {
        ComplexRecord { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SLoopRecord {
    pub length: usize,
    pub primitive_length: usize,
    #[serde(with = "exact::rational_string")]
    pub weight: Rational,
    pub excursions: Vec<Excursion>,
    pub canonical_vertices: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CuspedReport {
    pub order: usize,
    /// Taylor coefficients of `Z^{-1}` through `u^order`.
    #[serde(with = "exact::rational_vec")]
    pub series: Vec<Rational>,
    /// `p_1, ..., p_order`.
    #[serde(with = "exact::rational_vec")]
    pub traces: Vec<Rational>,
    pub max_length: usize,
    pub s_loops: Vec<SLoopRecord>,
    pub eigenvalues: Vec<ComplexRecord>,
    pub zeros: Vec<ComplexRecord>,
    pub diagnostic: EigenDiagnostic,
    pub checks: BTreeMap<String, CheckResult>,
}

impl CuspedReport {
    pub fn any_failed(&self) -> bool {
        self.checks.values().any(CheckResult::failed)
    }
}

pub fn cusped_report(
    cg: &CuspedGraph,
    w: &WeightScheme,
    opts: &RunOptions,
) -> Result<CuspedReport, ReportError> {
    let order = opts.order.unwrap_or(DEFAULT_CUSP_ORDER);
    if order == 0 {
        return Err(ReportError::Invalid("order must be at least 1".into()));
    }
    let max_length = opts.max_length.unwrap_or(order);
    let z = cusp::cusp_zeta_series(cg, w, order, opts.depth)?;
    let s_loops = cusp::enumerate_s_loops(cg, w, max_length, opts.cap)?
        .into_iter()
        .map(|c| SLoopRecord {
            length: c.class.length(),
            primitive_length: c.class.primitive_length(),
            weight: c.weight,
            excursions: c.excursions,
            canonical_vertices: c.class.vertices().to_vec(),
        })
        .collect();
    let mut checks = BTreeMap::new();
    checks.insert(
        "truncation_stable".to_string(),
        if z.traces.unstable.is_empty() {
            CheckResult::pass("p_j unchanged at depth ceil(j/2)+2")
        } else {
            CheckResult::fail(format!("p_j changed with depth for j in {:?}", z.traces.unstable))
        },
    );
    checks.insert(
        "trace_lemma".to_string(),
        cusp::cusp_trace_lemma_check(cg, w, order, opts.cap)?,
    );
    checks.insert(
        "euler_product".to_string(),
        cusp::cusp_euler_check(cg, w, order, opts.cap)?,
    );
    Ok(CuspedReport {
        order,
        series: z.series.coeffs().to_vec(),
        traces: z.traces.traces.clone(),
        max_length,
        s_loops,
        eigenvalues: z.eigenvalues.iter().map(ComplexRecord::from).collect(),
        zeros: z.zeros.iter().map(ComplexRecord::from).collect(),
        diagnostic: z.diagnostic,
        checks,
    })
}

pub fn dump_operator(g: &Graph) -> OperatorDump {
    transfer::dump_operator(g)
}
