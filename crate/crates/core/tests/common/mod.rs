//! Independent oracles for integration tests.
//!
//! `det_one_minus_ut` expands `det(1 - uT)` by fraction-free (Bareiss)
//! elimination over `Z[u]`, with `T` rebuilt here from the raw edge list.
//! It shares no code with the library's trace/Newton route.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type IntPoly = Vec<BigInt>;

fn trim(mut p: IntPoly) -> IntPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn sub(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

/// Exact quotient `a / d` where `d(0) = ±1`; panics if the division leaves
/// a remainder.
fn div_exact(a: &IntPoly, d: &IntPoly) -> IntPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let c0 = &d[0];
    assert!(c0.is_one() || (-c0).is_one(), "divisor must have unit constant term");
    let qlen = a.len() + 1 - d.len();
    let mut rem = a.clone();
    let mut q = vec![BigInt::zero(); qlen];
    for k in 0..qlen {
        let coef = &rem[k] * c0;
        for (j, dj) in d.iter().enumerate() {
            rem[k + j] -= &coef * dj;
        }
        q[k] = coef;
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
    trim(q)
}

/// Hashimoto matrix as 0/1 rows over oriented edges listed as `(a, b)` and
/// `(b, a)` for each input edge.
pub fn hashimoto(edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let oriented: Vec<(usize, usize)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    let n = oriented.len();
    let mut t = vec![vec![0i64; n]; n];
    for (i, &(_, b)) in oriented.iter().enumerate() {
        for (j, &(c, d)) in oriented.iter().enumerate() {
            let reverse = oriented[i] == (d, c);
            if b == c && !reverse {
                t[j][i] = 1;
            }
        }
    }
    t
}

/// Coefficients of `det(1 - uT)` for a square integer matrix `T`.
pub fn det_one_minus_ut(t: &[Vec<i64>]) -> IntPoly {
    let n = t.len();
    if n == 0 {
        return vec![BigInt::one()];
    }
    let mut m: Vec<Vec<IntPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let diag = if i == j { BigInt::one() } else { BigInt::zero() };
                    trim(vec![diag, BigInt::from(-t[i][j])])
                })
                .collect()
        })
        .collect();
    let mut prev: IntPoly = vec![BigInt::one()];
    for k in 0..n - 1 {
        let pivot = m[k][k].clone();
        assert!(!pivot.is_empty(), "leading minors of 1 - uT have constant term 1");
        for i in k + 1..n {
            for j in k + 1..n {
                let num = sub(&mul(&pivot, &m[i][j]), &mul(&m[i][k], &m[k][j]));
                m[i][j] = div_exact(&num, &prev);
            }
        }
        prev = pivot;
    }
    m[n - 1][n - 1].clone()
}

pub fn to_bigints(c: &[i64]) -> IntPoly {
    trim(c.iter().map(|&x| BigInt::from(x)).collect())
}
