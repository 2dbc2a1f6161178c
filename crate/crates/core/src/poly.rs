//! Dense univariate polynomials in `u` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

/// Coefficients are stored lowest degree first with no trailing zeros,
/// so the zero polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExactPoly {
    #[serde(with = "exact::rational_vec")]
    coeffs: Vec<Rational>,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ExactPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        ExactPoly::new(coeffs.iter().map(|&c| exact::int(c)).collect())
    }

    pub fn zero() -> Self {
        ExactPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        ExactPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        ExactPoly::new(vec![c])
    }

    /// `c·u^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        ExactPoly::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ExactPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        ExactPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * exact::int(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = ExactPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + exact::to_f64(c))
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(exact::to_f64).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(exact::is_integer)
    }

    pub fn div_rem(&self, divisor: &ExactPoly) -> Result<(ExactPoly, ExactPoly), PolyError> {
        let d = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let lead = divisor.leading().expect("nonzero divisor");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((ExactPoly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + d] / lead;
            if !c.is_zero() {
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * b;
                }
            }
            quot[k] = c;
        }
        rem.truncate(d);
        Ok((ExactPoly::new(quot), ExactPoly::new(rem)))
    }

    /// Quotient of a division known to be exact; the remainder is dropped.
    pub fn div_exact(&self, divisor: &ExactPoly) -> Result<ExactPoly, PolyError> {
        Ok(self.div_rem(divisor)?.0)
    }

    /// Rescales so the constant term is 1 when it is nonzero, otherwise monic.
    pub fn normalized(&self) -> ExactPoly {
        match self.coeffs.first() {
            None => ExactPoly::zero(),
            Some(c0) if !c0.is_zero() => self.scale(&c0.recip()),
            Some(_) => self.monic(),
        }
    }

    pub fn monic(&self) -> ExactPoly {
        match self.leading() {
            None => ExactPoly::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    pub fn gcd(&self, other: &ExactPoly) -> ExactPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }
}

impl Add for &ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &ExactPoly) -> ExactPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ExactPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &ExactPoly) -> ExactPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ExactPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        ExactPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &ExactPoly) -> ExactPoly {
        if self.is_zero() || rhs.is_zero() {
            return ExactPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ExactPoly::new(out)
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_mag = k == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "u")?,
                _ => write!(f, "u^{k}")?,
            }
        }
        Ok(())
    }
}

/// `p = unit · ∏ factor^exponent` with pairwise coprime square-free factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareFreeDecomposition {
    #[serde(with = "exact::rational_string")]
    pub unit: Rational,
    pub factors: Vec<SquareFreeFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareFreeFactor {
    pub factor: ExactPoly,
    pub exponent: usize,
}

impl SquareFreeDecomposition {
    pub fn expand(&self) -> ExactPoly {
        self.factors
            .iter()
            .fold(ExactPoly::constant(self.unit.clone()), |acc, f| {
                &acc * &f.factor.pow(f.exponent)
            })
    }
}

/// Yun's square-free decomposition over ℚ. Factors are normalized to
/// constant term 1 (or monic when the constant term vanishes).
pub fn squarefree_factor(p: &ExactPoly) -> Result<SquareFreeDecomposition, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut raw = Vec::new();
    if p.degree() > Some(0) {
        let dp = p.derivative();
        let a0 = p.gcd(&dp);
        let mut b = p.div_exact(&a0)?;
        let c = dp.div_exact(&a0)?;
        let mut d = &c - &b.derivative();
        let mut exponent = 1;
        while b.degree() > Some(0) {
            let a = b.gcd(&d);
            let next_b = b.div_exact(&a)?;
            let next_c = d.div_exact(&a)?;
            d = &next_c - &next_b.derivative();
            if a.degree() > Some(0) {
                raw.push((a.normalized(), exponent));
            }
            b = next_b;
            exponent += 1;
        }
    }
    let product = raw
        .iter()
        .fold(ExactPoly::one(), |acc, (f, e)| &acc * &f.pow(*e));
    let (unit, rem) = p.div_rem(&product)?;
    debug_assert!(rem.is_zero() && unit.degree() == Some(0));
    Ok(SquareFreeDecomposition {
        unit: unit.coeff(0),
        factors: raw
            .into_iter()
            .map(|(factor, exponent)| SquareFreeFactor { factor, exponent })
            .collect(),
    })
}
