//! The Ihara/Bass zeta function of a finite graph and its verifications.
//!
//! `Z_Y(u)^{-1} = det(1 - uT)` is computed from exact power traces of the
//! edge operator. The checks compare it against the Euler product over
//! enumerated prime loops, the partial-fraction form of `Z'/Z`, and the
//! functional equation relating `Z(u)` and `Z(1/(qu))` for regular graphs.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{self, Rational};
use crate::graph::Graph;
use crate::loops::{self, LoopError, DEFAULT_CLASS_CAP};
use crate::poly::{ExactPoly, SquareFreeFactor};
use crate::roots::{self, PoleSet, RootError, DEFAULT_ROOT_TOL};
use crate::series::{self, SeriesError, TruncatedSeries};
use crate::transfer::edge_operator;

/// Tolerance for checks mixing numeric roots with exact series.
pub const DEFAULT_CROSS_TOL: f64 = 1e-9;
/// Distance under which a root counts as sitting on an exceptional point
/// or on the circle `|u| = 1/√q`.
pub const CLASSIFY_TOL: f64 = 1e-9;
pub const DEFAULT_SAMPLE_COUNT: usize = 8;
pub const DEFAULT_SEED: u64 = 20_240_601;
const SINGULAR_MARGIN: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ZetaError {
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("regularity required: the graph is not regular")]
    NotRegular,
    #[error("a connected graph is required")]
    NotConnected,
    #[error("branching number q = {q} is below the required {needed}")]
    BranchingTooSmall { q: usize, needed: usize },
    #[error("sample u = {re}{im:+}i lies within 1e-6 of {reason}")]
    SampleTooClose { re: f64, im: f64, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckResult {
    pub fn pass(detail: impl Into<String>) -> Self {
        CheckResult {
            status: CheckStatus::Pass,
            detail: detail.into(),
        }
    }

    pub fn fail(detail: impl Into<String>) -> Self {
        CheckResult {
            status: CheckStatus::Fail,
            detail: detail.into(),
        }
    }

    pub fn skipped(detail: impl Into<String>) -> Self {
        CheckResult {
            status: CheckStatus::Skipped,
            detail: detail.into(),
        }
    }

    pub fn from_bool(ok: bool, detail: impl Into<String>) -> Self {
        if ok {
            CheckResult::pass(detail)
        } else {
            CheckResult::fail(detail)
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

/// `Z_Y(u)^{-1} = det(1 - uT)`, exact integer coefficients.
pub fn zeta_inverse(g: &Graph) -> ExactPoly {
    let t = edge_operator(g);
    let d = t.dimension();
    series::det_one_minus_ut(&t.trace_powers(d), d).expect("d traces for dimension d")
}

/// Series inverse of `det(1 - uT)` against the Euler product over primes
/// of length `≤ order`.
pub fn euler_vs_det_check(g: &Graph, order: usize) -> Result<CheckResult, ZetaError> {
    euler_vs_det_check_capped(g, order, DEFAULT_CLASS_CAP)
}

pub fn euler_vs_det_check_capped(
    g: &Graph,
    order: usize,
    cap: usize,
) -> Result<CheckResult, ZetaError> {
    let det_side = TruncatedSeries::from_poly(&zeta_inverse(g), order).inv()?;
    let euler_side = loops::euler_product_series_capped(g, order, cap)?;
    Ok(match det_side.first_mismatch(&euler_side) {
        None => CheckResult::pass(format!("exact agreement through u^{order}")),
        Some(k) => CheckResult::fail(format!(
            "coefficient of u^{k}: determinant side {} vs Euler product {}",
            det_side.coeff(k),
            euler_side.coeff(k)
        )),
    })
}

/// `Z'/Z` up to `u^order`, computed from the loop census
/// (`[u^{n-1}] = Σ_{l(c)=n} l(c_0)`) and from power traces `tr T^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDerivative {
    pub from_loops: TruncatedSeries,
    pub from_traces: TruncatedSeries,
}

impl LogDerivative {
    pub fn consistent(&self) -> bool {
        self.from_loops == self.from_traces
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.from_loops
    }
}

pub fn log_derivative_series(g: &Graph, order: usize) -> Result<LogDerivative, ZetaError> {
    log_derivative_series_capped(g, order, DEFAULT_CLASS_CAP)
}

pub fn log_derivative_series_capped(
    g: &Graph,
    order: usize,
    cap: usize,
) -> Result<LogDerivative, ZetaError> {
    let n_max = order + 1;
    let census = loop_census(g, n_max, cap)?;
    let traces = edge_operator(g).trace_powers(n_max);
    Ok(LogDerivative {
        from_loops: TruncatedSeries::new(order, census[1..].to_vec()),
        from_traces: TruncatedSeries::new(order, traces),
    })
}

/// `Σ_{l(c)=n} l(c_0)` for `n = 0..=n_max`.
pub fn loop_census(g: &Graph, n_max: usize, cap: usize) -> Result<Vec<Rational>, ZetaError> {
    let mut census = vec![Rational::zero(); n_max + 1];
    for c in loops::enumerate_loops_capped(g, n_max, cap)? {
        census[c.length()] += exact::int(c.primitive_length() as i64);
    }
    Ok(census)
}

/// `tr T^n`, the loop census and `[u^{n-1}] Z'/Z` (from the determinant
/// polynomial) agree for `n = 1..=n_max`.
pub fn trace_identity_check(g: &Graph, n_max: usize) -> Result<CheckResult, ZetaError> {
    trace_identity_check_capped(g, n_max, DEFAULT_CLASS_CAP)
}

pub fn trace_identity_check_capped(
    g: &Graph,
    n_max: usize,
    cap: usize,
) -> Result<CheckResult, ZetaError> {
    let traces = edge_operator(g).trace_powers(n_max);
    let census = loop_census(g, n_max, cap)?;
    // Z'/Z = -(Z^{-1})' / Z^{-1}
    let inv = TruncatedSeries::from_poly(&zeta_inverse(g), n_max);
    let log_der = -&series::log_derivative(&inv)?;
    for n in 1..=n_max {
        let (t, c, l) = (&traces[n - 1], &census[n], log_der.coeff(n - 1));
        if t != c || t != l {
            return Ok(CheckResult::fail(format!(
                "n = {n}: tr T^n = {t}, loop census = {c}, [u^{}] Z'/Z = {l}",
                n - 1
            )));
        }
    }
    Ok(CheckResult::pass(format!("exact agreement for n = 1..={n_max}")))
}

fn require_regular(g: &Graph, min_q: usize) -> Result<usize, ZetaError> {
    let q = g.branching().ok_or(ZetaError::NotRegular)?;
    if q < min_q {
        return Err(ZetaError::BranchingTooSmall { q, needed: min_q });
    }
    Ok(q)
}

/// `−Σ m/(u − u*)` over numeric roots, expanded at 0, against the exact
/// coefficients of `Z'/Z` up to `u^order`.
pub fn lefschetz_check(g: &Graph, order: usize, tol: f64) -> Result<CheckResult, ZetaError> {
    let p = zeta_inverse(g);
    if p.degree() == Some(0) {
        return Ok(CheckResult::pass("vacuous: Z^{-1} = 1, no poles"));
    }
    require_regular(g, 1)?;
    let poles = roots::pole_set(&p, DEFAULT_ROOT_TOL)?;
    let log_der = log_derivative_series(g, order)?;
    if !log_der.consistent() {
        return Ok(CheckResult::fail("loop census and traces disagree"));
    }
    let mut worst = 0.0f64;
    for k in 0..=order {
        // [u^k] −Σ m/(u − u*) = Σ m u*^{-(k+1)}
        let numeric: Complex64 = poles
            .poles
            .iter()
            .map(|pole| pole.root.powi(-(k as i32 + 1)) * pole.multiplicity as f64)
            .sum();
        let exact_value = exact::to_f64(log_der.series().coeff(k));
        let err = (numeric - exact_value).norm() / exact_value.abs().max(1.0);
        worst = worst.max(err);
        if !(err < tol) {
            return Ok(CheckResult::fail(format!(
                "coefficient of u^{k}: partial fractions give {numeric}, exact {exact_value} (rel. error {err:e})"
            )));
        }
    }
    Ok(CheckResult::pass(format!(
        "coefficients u^0..u^{order} agree, worst relative error {worst:.3e}"
    )))
}

/// Pseudorandom points in the annulus `0.05 < |u| < 0.4`.
pub fn default_samples(seed: u64, count: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r: f64 = rng.random_range(0.05..0.4);
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(r, theta)
        })
        .collect()
}

/// `Z(1/(qu)) = ((1 − u²)/(q²u² − 1))^{r1−r0} q^{2r1−r0} u^{2r1} Z(u)` at each
/// sample, relative error below `tol`.
pub fn functional_equation_check(
    g: &Graph,
    samples: &[Complex64],
    tol: f64,
) -> Result<CheckResult, ZetaError> {
    if !g.is_connected() {
        return Err(ZetaError::NotConnected);
    }
    let q = require_regular(g, 2)?;
    let p = zeta_inverse(g);
    let poles = roots::pole_set(&p, DEFAULT_ROOT_TOL)?;
    let qf = q as f64;
    let singular = [1.0, -1.0, 1.0 / qf, -1.0 / qf];
    let r0 = g.vertex_count() as i32;
    let r1 = g.edge_count() as i32;
    let too_close = |u: Complex64, reason: String| ZetaError::SampleTooClose {
        re: u.re,
        im: u.im,
        reason,
    };

    let mut worst = 0.0f64;
    for &u in samples {
        if u.norm() < SINGULAR_MARGIN {
            return Err(too_close(u, "0".into()));
        }
        if let Some(s) = singular.iter().find(|&&s| (u - s).norm() < SINGULAR_MARGIN) {
            return Err(too_close(u, format!("the singular point {s}")));
        }
        let dual = (u * qf).inv();
        for pole in &poles.poles {
            if (u - pole.root).norm() < SINGULAR_MARGIN || (dual - pole.root).norm() < SINGULAR_MARGIN
            {
                return Err(too_close(u, "a zero of Z^{-1}".into()));
            }
        }
        let lhs = p.eval_complex(dual).inv();
        let u2 = u * u;
        let ratio = (Complex64::new(1.0, 0.0) - u2) / (u2 * (qf * qf) - 1.0);
        let rhs = ratio.powi(r1 - r0) * qf.powi(2 * r1 - r0) * u.powi(2 * r1) / p.eval_complex(u);
        let err = (lhs - rhs).norm() / rhs.norm();
        worst = worst.max(err);
        if !(err < tol) {
            return Ok(CheckResult::fail(format!(
                "u = {u}: Z(1/(qu)) = {lhs}, right-hand side {rhs} (rel. error {err:e})"
            )));
        }
    }
    Ok(CheckResult::pass(format!(
        "{} samples agree, worst relative error {worst:.3e}",
        samples.len()
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleRecord {
    pub u_re: f64,
    pub u_im: f64,
    pub multiplicity: usize,
    pub lambda_re: Option<f64>,
    pub lambda_im: Option<f64>,
    pub exceptional: Option<bool>,
    pub on_critical_circle: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorRecord {
    pub factor: ExactPoly,
    pub exponent: usize,
}

impl From<&SquareFreeFactor> for FactorRecord {
    fn from(f: &SquareFreeFactor) -> Self {
        FactorRecord {
            factor: f.factor.clone(),
            exponent: f.exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaReport {
    pub zeta_inverse_coeffs: ExactPoly,
    pub degree: usize,
    pub q: Option<usize>,
    pub r0: usize,
    pub r1: usize,
    pub connected: bool,
    pub squarefree_factors: Vec<FactorRecord>,
    pub poles: Vec<PoleRecord>,
    pub checks: BTreeMap<String, CheckResult>,
}

impl ZetaReport {
    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, c)| c.failed())
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

fn classify(root: Complex64, multiplicity: usize, q: Option<usize>) -> PoleRecord {
    let mut record = PoleRecord {
        u_re: root.re,
        u_im: root.im,
        multiplicity,
        lambda_re: None,
        lambda_im: None,
        exceptional: None,
        on_critical_circle: None,
    };
    if let Some(q) = q.filter(|&q| q >= 1) {
        let qf = q as f64;
        let lambda = root * qf;
        let s = qf.sqrt().recip();
        let special = [s, -s, 1.0 / qf, -1.0 / qf, 1.0, -1.0];
        record.lambda_re = Some(lambda.re);
        record.lambda_im = Some(lambda.im);
        record.exceptional = Some(special.iter().any(|&x| (root - x).norm() < CLASSIFY_TOL));
        record.on_critical_circle = Some((root.norm() - s).abs() < CLASSIFY_TOL);
    }
    record
}

/// Square-free factorization and roots of `Z^{-1}` with exact multiplicities.
pub fn pole_report(g: &Graph) -> Result<ZetaReport, ZetaError> {
    let p = zeta_inverse(g);
    let sf = crate::poly::squarefree_factor(&p).map_err(RootError::from)?;
    let poles: PoleSet = roots::pole_set(&p, DEFAULT_ROOT_TOL)?;
    let q = g.branching();
    let degree = p.degree().unwrap_or(0);
    let r1 = g.edge_count();

    let mut checks = BTreeMap::new();
    checks.insert(
        "zeta_inverse_at_zero".to_string(),
        CheckResult::from_bool(p.coeff(0) == exact::int(1), format!("Z^{{-1}}(0) = {}", p.coeff(0))),
    );
    checks.insert(
        "multiplicity_sum".to_string(),
        CheckResult::from_bool(
            poles.multiplicity_sum() == degree,
            format!("sum of multiplicities {} vs degree {degree}", poles.multiplicity_sum()),
        ),
    );
    let degree_check = match q {
        Some(q) if q >= 2 && g.is_connected() => CheckResult::from_bool(
            degree == 2 * r1 && poles.multiplicity_sum() == 2 * r1,
            format!("degree {degree}, 2*r1 = {}", 2 * r1),
        ),
        _ => CheckResult::skipped("requires a connected (q+1)-regular graph with q >= 2"),
    };
    checks.insert("degree_equals_2r1".to_string(), degree_check);

    Ok(ZetaReport {
        degree,
        q,
        r0: g.vertex_count(),
        r1,
        connected: g.is_connected(),
        squarefree_factors: sf.factors.iter().map(FactorRecord::from).collect(),
        poles: poles
            .poles
            .iter()
            .map(|pole| classify(pole.root, pole.multiplicity, q))
            .collect(),
        checks,
        zeta_inverse_coeffs: p,
    })
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub lefschetz_order: usize,
    pub tol: f64,
    pub seed: u64,
    pub sample_count: usize,
    pub cap: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            lefschetz_order: 15,
            tol: DEFAULT_CROSS_TOL,
            seed: DEFAULT_SEED,
            sample_count: DEFAULT_SAMPLE_COUNT,
            cap: DEFAULT_CLASS_CAP,
        }
    }
}

/// [`pole_report`] plus the Lefschetz and functional-equation checks where
/// the graph satisfies their preconditions.
pub fn full_report(g: &Graph, opts: &ReportOptions) -> Result<ZetaReport, ZetaError> {
    let mut report = pole_report(g)?;
    let lefschetz = match lefschetz_check(g, opts.lefschetz_order, opts.tol) {
        Ok(c) => c,
        Err(ZetaError::NotRegular) | Err(ZetaError::BranchingTooSmall { .. }) => {
            CheckResult::skipped("regularity required")
        }
        Err(e) => return Err(e),
    };
    report.checks.insert("lefschetz".into(), lefschetz);
    let samples = admissible_samples(g, opts.seed, opts.sample_count);
    let funceq = match functional_equation_check(g, &samples, opts.tol) {
        Ok(c) => c,
        Err(ZetaError::NotRegular) => CheckResult::skipped("regularity required"),
        Err(ZetaError::BranchingTooSmall { .. }) => CheckResult::skipped("requires q >= 2"),
        Err(ZetaError::NotConnected) => CheckResult::skipped("graph is not connected"),
        Err(e) => return Err(e),
    };
    report.checks.insert("functional_equation".into(), funceq);
    Ok(report)
}

/// Default samples with points too close to the singular set dropped.
pub fn admissible_samples(g: &Graph, seed: u64, count: usize) -> Vec<Complex64> {
    let Some(q) = g.branching().filter(|&q| q >= 2) else {
        return default_samples(seed, count);
    };
    let p = zeta_inverse(g);
    let Ok(poles) = roots::pole_set(&p, DEFAULT_ROOT_TOL) else {
        return default_samples(seed, count);
    };
    let qf = q as f64;
    let near = |z: Complex64| {
        [1.0, -1.0, 1.0 / qf, -1.0 / qf]
            .iter()
            .any(|&s| (z - s).norm() < SINGULAR_MARGIN)
            || poles.poles.iter().any(|pl| (z - pl.root).norm() < SINGULAR_MARGIN)
    };
    let mut rng_seed = seed;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        for u in default_samples(rng_seed, count) {
            if out.len() < count && !near(u) && !near((u * qf).inv()) {
                out.push(u);
            }
        }
        rng_seed = rng_seed.wrapping_add(1);
    }
    out
}

/// Coefficients as `i64`, when they all fit.
pub fn integer_coefficients(p: &ExactPoly) -> Option<Vec<i64>> {
    p.coeffs()
        .iter()
        .map(|c| if exact::is_integer(c) { c.to_integer().to_i64() } else { None })
        .collect()
}
