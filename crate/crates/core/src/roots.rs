//! Numeric roots of exact square-free factors.
//!
//! Multiplicities are never estimated from clustering: every root inherits
//! the exponent of the square-free factor it belongs to.

use std::cmp::Ordering;

use num_complex::Complex64;
use thiserror::Error;

use crate::poly::{squarefree_factor, ExactPoly, PolyError};

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("root iteration did not converge (degree {degree}, worst residual {residual:e})")]
    NoConvergence { degree: usize, residual: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `|p(z)| / Σ|c_k||z|^k`, the relative backward error of `z` as a root.
pub fn relative_residual(coeffs: &[f64], z: Complex64) -> f64 {
    let mut value = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let r = z.norm();
    for c in coeffs.iter().rev() {
        value = value * z + c;
        scale = scale * r + c.abs();
    }
    if scale == 0.0 {
        0.0
    } else {
        value.norm() / scale
    }
}

fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of a square-free polynomial, sorted by `(re, im)`.
///
/// Aberth–Ehrlich simultaneous iteration followed by Newton polishing;
/// every root must reach a relative residual below `tol`.
pub fn numeric_roots(factor: &ExactPoly, tol: f64) -> Result<Vec<Complex64>, RootError> {
    let degree = factor.degree().ok_or(PolyError::ZeroPolynomial)?;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let coeffs = factor.to_f64_coeffs();
    let lead = coeffs[degree];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();

    // Initial guesses on a circle whose radius is the geometric mean of
    // the root moduli, rotated off the real axis.
    let radius = (monic[0].abs().max(f64::MIN_POSITIVE)).powf(1.0 / degree as f64);
    let radius = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64 + 0.25) / degree as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..degree {
            let (p, dp) = eval_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }

    for root in &mut z {
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(&monic, *root);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *root -= step;
        }
        if root.im.abs() <= 1e-14 * root.norm() {
            root.im = 0.0;
        }
    }

    let worst = z
        .iter()
        .map(|&root| relative_residual(&coeffs, root))
        .fold(0.0, f64::max);
    if !(worst < tol) {
        return Err(RootError::NoConvergence {
            degree,
            residual: worst,
        });
    }
    z.sort_by(cmp_complex);
    Ok(z)
}

pub fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

#[derive(Debug, Clone)]
pub struct Pole {
    pub root: Complex64,
    pub multiplicity: usize,
    /// Index into [`PoleSet::factors`].
    pub factor_index: usize,
}

#[derive(Debug, Clone)]
pub struct PoleSet {
    pub poles: Vec<Pole>,
    pub factors: Vec<(ExactPoly, usize)>,
}

impl PoleSet {
    pub fn multiplicity_sum(&self) -> usize {
        self.poles.iter().map(|p| p.multiplicity).sum()
    }
}

/// Roots of `p` with exact multiplicities from its square-free decomposition.
pub fn pole_set(p: &ExactPoly, tol: f64) -> Result<PoleSet, RootError> {
    let sf = squarefree_factor(p)?;
    let mut poles = Vec::new();
    let mut factors = Vec::new();
    for (index, f) in sf.factors.iter().enumerate() {
        for root in numeric_roots(&f.factor, tol)? {
            poles.push(Pole {
                root,
                multiplicity: f.exponent,
                factor_index: index,
            });
        }
        factors.push((f.factor.clone(), f.exponent));
    }
    poles.sort_by(|a, b| cmp_complex(&a.root, &b.root));
    Ok(PoleSet { poles, factors })
}
