//! Small dense symmetric eigen-solvers.
//!
//! Two independent routes are provided: cyclic Jacobi rotations
//! ([`jacobi_eigen`]) and Householder reduction followed by implicit-shift
//! QL on the tridiagonal form ([`tridiagonal_eigen`], [`symmetric_eigen`]).
//! Both are deterministic: the same input bits always give the same output.

// Index loops mirror the textbook recurrences.
#![allow(clippy::needless_range_loop)]

mod jacobi;
mod tridiagonal;

pub use jacobi::jacobi_eigen;
pub use tridiagonal::{householder_tridiagonalize, symmetric_eigen, tridiagonal_eigen};

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        DenseMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix { n, data })
    }

    /// Symmetric tridiagonal matrix from its diagonal and first off-diagonal.
    pub fn tridiagonal(diag: &[f64], off: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, diag[i]);
        }
        for (i, &v) in off.iter().enumerate().take(n.saturating_sub(1)) {
            m.set(i, i + 1, v);
            m.set(i + 1, i, v);
        }
        m
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Diagonal and first super-diagonal, if every other entry is exactly zero.
    pub fn tridiagonal_parts(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > 1 && self.get(i, j) != 0.0 {
                    return None;
                }
            }
        }
        let diag = (0..n).map(|i| self.get(i, i)).collect();
        let off = (0..n.saturating_sub(1)).map(|i| self.get(i, i + 1)).collect();
        Some((diag, off))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok((0..self.n).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect())
    }

    /// Principal submatrix obtained by dropping the first `skip` rows and columns.
    pub fn trailing(&self, skip: usize) -> Self {
        let n = self.n - skip;
        Self::from_fn(n, |i, j| self.get(i + skip, j + skip))
    }
}

pub(crate) fn sort_decreasing(values: &mut [f64]) {
    values.sort_by(|a, b| b.total_cmp(a));
}
