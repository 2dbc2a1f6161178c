//! Power series in `u` truncated after `u^N`, with exact coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{self, Rational};
use crate::poly::ExactPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("exp requires a vanishing constant term")]
    ExpDomain,
    #[error("log requires constant term 1")]
    LogDomain,
    #[error("inverse requires a nonzero constant term")]
    NotInvertible,
    #[error("series orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error("need at least {needed} power traces, got {given}")]
    NotEnoughTraces { needed: usize, given: usize },
}

/// Values modulo `u^(order+1)`: `coeffs[k]` is the coefficient of `u^k`
/// for `k = 0..=order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TruncatedSeries {
    order: usize,
    #[serde(with = "exact::rational_vec")]
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn new(order: usize, mut coeffs: Vec<Rational>) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        TruncatedSeries { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries::new(order, Vec::new())
    }

    pub fn one(order: usize) -> Self {
        TruncatedSeries::new(order, vec![Rational::one()])
    }

    pub fn from_poly(p: &ExactPoly, order: usize) -> Self {
        TruncatedSeries::new(order, p.coeffs().iter().take(order + 1).cloned().collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn to_poly(&self) -> ExactPoly {
        ExactPoly::new(self.coeffs.clone())
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order, "cannot raise truncation order");
        TruncatedSeries::new(order, self.coeffs[..=order].to_vec())
    }

    /// Index of the first coefficient where the two series differ.
    pub fn first_mismatch(&self, other: &TruncatedSeries) -> Option<usize> {
        let n = self.order.min(other.order);
        (0..=n).find(|&k| self.coeffs[k] != other.coeffs[k])
    }

    pub fn derivative(&self) -> Self {
        let coeffs = (1..=self.order)
            .map(|k| &self.coeffs[k] * exact::int(k as i64))
            .collect();
        TruncatedSeries::new(self.order.saturating_sub(1), coeffs)
    }

    pub fn inv(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = a0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.order + 1);
        out.push(inv0.clone());
        for n in 1..=self.order {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[n - k];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(TruncatedSeries::new(self.order, out))
    }

    /// `exp(f)` through `n g_n = Σ_{k=1}^{n} k f_k g_{n-k}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::ExpDomain);
        }
        let mut g: Vec<Rational> = Vec::with_capacity(self.order + 1);
        g.push(Rational::one());
        for n in 1..=self.order {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * exact::int(k as i64) * &g[n - k];
                }
            }
            g.push(acc / exact::int(n as i64));
        }
        Ok(TruncatedSeries::new(self.order, g))
    }

    /// `log(g)` for `g_0 = 1` through `n f_n = n g_n - Σ_{k=1}^{n-1} k f_k g_{n-k}`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::LogDomain);
        }
        let mut f: Vec<Rational> = Vec::with_capacity(self.order + 1);
        f.push(Rational::zero());
        for n in 1..=self.order {
            let mut acc = &self.coeffs[n] * exact::int(n as i64);
            for k in 1..n {
                if !f[k].is_zero() {
                    acc -= &f[k] * exact::int(k as i64) * &self.coeffs[n - k];
                }
            }
            f.push(acc / exact::int(n as i64));
        }
        Ok(TruncatedSeries::new(self.order, f))
    }

    pub fn checked_mul(&self, rhs: &TruncatedSeries) -> Result<Self, SeriesError> {
        if self.order != rhs.order {
            return Err(SeriesError::OrderMismatch(self.order, rhs.order));
        }
        Ok(self * rhs)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    /// Truncates to the smaller of the two orders.
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries::new(order, out)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        TruncatedSeries::new(
            order,
            (0..=order).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        )
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        TruncatedSeries::new(
            order,
            (0..=order).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect(),
        )
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::new(self.order, self.coeffs.iter().map(|c| -c).collect())
    }
}

/// `det(1 - uT)` of a `dimension`-square matrix from its power traces
/// `p_k = tr T^k`, `k = 1..=dimension`, by Newton's identities
/// `k e_k = Σ_{i=1}^{k} (-1)^{i-1} e_{k-i} p_i`; the coefficient of `u^k`
/// is `(-1)^k e_k`.
pub fn det_one_minus_ut(traces: &[Rational], dimension: usize) -> Result<ExactPoly, SeriesError> {
    if traces.len() < dimension {
        return Err(SeriesError::NotEnoughTraces {
            needed: dimension,
            given: traces.len(),
        });
    }
    let mut e: Vec<Rational> = Vec::with_capacity(dimension + 1);
    e.push(Rational::one());
    for k in 1..=dimension {
        let mut acc = Rational::zero();
        for i in 1..=k {
            let term = &e[k - i] * &traces[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / exact::int(k as i64));
    }
    Ok(ExactPoly::new(
        e.into_iter()
            .enumerate()
            .map(|(k, ek)| if k % 2 == 1 { -ek } else { ek })
            .collect(),
    ))
}

/// `exp(-Σ_{n≥1} p_n u^n / n)` truncated at `order`; uses `p_1..p_order`.
pub fn exp_neg_trace_sum(traces: &[Rational], order: usize) -> Result<TruncatedSeries, SeriesError> {
    if traces.len() < order {
        return Err(SeriesError::NotEnoughTraces {
            needed: order,
            given: traces.len(),
        });
    }
    let mut exponent = vec![Rational::zero()];
    exponent.extend(
        traces[..order]
            .iter()
            .enumerate()
            .map(|(i, p)| -p / exact::int(i as i64 + 1)),
    );
    TruncatedSeries::new(order, exponent).exp()
}

/// Logarithmic derivative `f'/f` of a series with `f(0) = 1`, truncated to
/// one order less than `f`.
pub fn log_derivative(f: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    let inv = f.inv()?;
    let d = f.derivative();
    Ok(&d * &inv)
}
