//! Small dense matrices over the rationals.

use std::fmt;

use num_traits::{One, Zero};

use crate::exact::{self, ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn scalar(value: Rational) -> Self {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![value],
        }
    }

    /// `None` when the rows are ragged or do not have `cols` entries.
    /// With zero rows the column count cannot be read from the data, so
    /// `cols` supplies it.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| exact::int(x)).collect())
                .collect(),
            cols,
        )
        .expect("rectangular literal")
    }

    /// Parses rows of rational literals; see [`exact::parse_rational`].
    pub fn parse(rows: &[Vec<String>]) -> Result<Vec<Vec<Rational>>, ParseRationalError> {
        rows.iter()
            .map(|r| r.iter().map(|s| exact::parse_rational(s)).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(exact::format_rational).collect())
            .collect()
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| &self[(i, i)])
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// `None` on a shape mismatch.
    pub fn checked_mul(&self, rhs: &Matrix) -> Option<Matrix> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * &rhs[(k, j)];
                }
            }
        }
        Some(out)
    }

    pub fn pow(&self, mut e: usize) -> Matrix {
        assert_eq!(self.rows, self.cols, "power of a non-square matrix");
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
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

    /// `tr M^k` for `k = 1..=n`.
    pub fn trace_powers(&self, n: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(n);
        let mut p = self.clone();
        for k in 0..n {
            if k > 0 {
                p = &p * self;
            }
            out.push(p.trace());
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl std::ops::Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix shapes do not chain")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(exact::format_rational).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_powers() {
        let r = Matrix::from_i64(&[&[0, -1], &[1, 0]]);
        let traces: Vec<i64> = r
            .trace_powers(4)
            .iter()
            .map(|t| t.to_integer().try_into().unwrap())
            .collect();
        assert_eq!(traces, vec![0, -2, 0, 2]);
        assert!(r.pow(4).is_identity());
        assert_eq!(r.pow(2), Matrix::from_i64(&[&[-1, 0], &[0, -1]]));
    }

    #[test]
    fn rectangular_products() {
        let col = Matrix::from_i64(&[&[1], &[3]]);
        let row = Matrix::from_i64(&[&[1, 0]]);
        assert!((&row * &col).is_identity());
        assert_eq!((&col * &row).shape(), (2, 2));
        assert!(col.checked_mul(&col).is_none());
    }

    #[test]
    fn empty_shapes() {
        let a = Matrix::zeros(0, 2);
        let b = Matrix::zeros(2, 0);
        assert_eq!((&a * &Matrix::identity(2)).shape(), (0, 2));
        assert_eq!((&b * &a).shape(), (2, 2));
        assert!(Matrix::identity(0).is_identity());
        assert!(Matrix::from_rows(vec![vec![exact::int(1)], vec![]], 1).is_none());
        assert_eq!(Matrix::from_rows(vec![], 3).unwrap().shape(), (0, 3));
    }
}
