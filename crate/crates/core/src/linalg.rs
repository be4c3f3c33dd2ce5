//! Small dense row-major matrices and a dense LU solver.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += vi * m;
            }
        }
        out
    }

    /// Infinity norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix<T>) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, backed by nalgebra.
#[derive(Debug, Clone)]
pub struct Lu<T: Scalar> {
    lu: nalgebra::linalg::LU<T, nalgebra::Dyn, nalgebra::Dyn>,
}

impl<T: Scalar> Lu<T> {
    /// Fails with [`Error::Singular`] when a pivot is negligible relative to
    /// the largest entry of `a`.
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!("{}x{} is not square", a.rows, a.cols)));
        }
        let n = a.rows;
        let dense = nalgebra::DMatrix::from_row_slice(n, n, &a.data);
        let scale = a.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
        let tiny = scale * T::machine_epsilon() * T::count(n.max(1));
        let lu = dense.lu();
        let u = lu.u();
        if (0..n).any(|k| !(u[(k, k)].abs() > tiny)) {
            return Err(Error::Singular);
        }
        Ok(Self { lu })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let rhs = nalgebra::DVector::from_column_slice(b);
        self.lu.solve(&rhs).expect("pivots checked at factorization").as_slice().to_vec()
    }

    /// Solve with one step of iterative refinement against the original matrix.
    pub fn solve_refined(&self, a: &Matrix<T>, b: &[T]) -> Vec<T> {
        let mut x = self.solve(b);
        let r: Vec<T> = (0..a.rows)
            .map(|i| b[i] - a.row(i).iter().zip(&x).fold(T::zero(), |s, (&aij, &xj)| s + aij * xj))
            .collect();
        let dx = self.solve(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        x
    }

    pub fn inverse(&self) -> Matrix<T> {
        let inv = self.lu.try_inverse().expect("pivots checked at factorization");
        let n = inv.nrows();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = inv[(i, j)];
            }
        }
        out
    }
}
