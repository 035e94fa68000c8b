//! Dense matrices over [`ComplexRational`].

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::ComplexRational;

#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![ComplexRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ComplexRational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ComplexRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<ComplexRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[ComplexRational]) {
        assert!(v.len() <= self.rows, "column of length {} into {} rows", v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v.get(i).cloned().unwrap_or_else(ComplexRational::zero);
        }
    }

    /// Top-left `rows × cols` block; missing entries are zero.
    pub fn resized(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)].clone()
            } else {
                ComplexRational::zero()
            }
        })
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, rhs: &QMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[ComplexRational]) -> Vec<ComplexRational> {
        assert_eq!(self.cols, x.len(), "vector length differs from column count");
        let mut out = vec![ComplexRational::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (k, xk) in x.iter().enumerate() {
                let a = &self[(i, k)];
                if !a.is_zero() && !xk.is_zero() {
                    *o += &(a * xk);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &QMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        Self::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &QMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        Self::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }

    pub fn pow(&self, n: u32) -> Self {
        assert_eq!(self.rows, self.cols, "power of a non-square matrix");
        let mut out = Self::identity(self.rows);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ComplexRational::is_zero)
    }

    /// Solves `A X = B` by Gauss–Jordan elimination.
    pub fn solve(&self, b: &QMatrix) -> Result<QMatrix> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(self.rows, b.rows, "right-hand side has the wrong row count");
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[(r, col)].is_zero())
                .ok_or(Error::DivisionByZero("singular matrix in exact solve"))?;
            if pivot != col {
                a.swap_rows(pivot, col);
                x.swap_rows(pivot, col);
            }
            let inv = a[(col, col)].inv()?;
            a.scale_row(col, &inv);
            x.scale_row(col, &inv);
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                a.axpy_row(r, col, &factor);
                x.axpy_row(r, col, &factor);
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        self.solve(&Self::identity(self.rows))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, k: &ComplexRational) {
        for j in 0..self.cols {
            self[(r, j)] *= k;
        }
    }

    /// `row[r] -= k · row[src]`.
    fn axpy_row(&mut self, r: usize, src: usize, k: &ComplexRational) {
        for j in 0..self.cols {
            let s = &self[(src, j)];
            if !s.is_zero() {
                let d = k * s;
                self[(r, j)] -= &d;
            }
        }
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = ComplexRational;

    fn index(&self, (i, j): (usize, usize)) -> &ComplexRational {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of {}×{}", self.rows, self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexRational {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of {}×{}", self.rows, self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}×{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> ComplexRational {
        ComplexRational::from_int(n)
    }

    #[test]
    fn inverse_round_trip() {
        let a = QMatrix::from_fn(3, 3, |i, j| q(((i * 3 + j) as i64 * 7) % 5 + i64::from(i == j) * 3));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMatrix::identity(3));
        assert_eq!(inv.mul(&a), QMatrix::identity(3));
    }

    #[test]
    fn singular_is_reported() {
        let a = QMatrix::from_fn(2, 2, |_, _| q(1));
        assert!(matches!(a.inverse(), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn complex_solve() {
        let i = ComplexRational::i();
        let mut a = QMatrix::zeros(2, 2);
        a[(0, 0)] = i.clone();
        a[(0, 1)] = q(1);
        a[(1, 0)] = q(2);
        a[(1, 1)] = -i.clone();
        let b = QMatrix::from_fn(2, 1, |r, _| q(r as i64 + 1));
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x), b);
    }
}
