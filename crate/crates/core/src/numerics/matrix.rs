use std::ops::{Index, IndexMut};

use super::{Precision, Real};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize, prec: Precision) -> Self {
        Matrix { rows, cols, data: vec![T::zero_at(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: Precision) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)] = T::one_at(prec);
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length does not
    /// match the shape.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match {rows}x{cols}");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() }
    }

    pub fn from_f64_rows(rows: &[&[f64]], prec: Precision) -> Self {
        let v: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&x| T::from_f64(x, prec)).collect()).collect();
        Self::from_rows(&v)
    }

    /// Column vector.
    pub fn column(values: Vec<T>) -> Self {
        let n = values.len();
        Matrix { rows: n, cols: 1, data: values }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn precision(&self) -> Option<Precision> {
        self.data.first().map(Real::precision)
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let prec = self.precision().or(other.precision()).unwrap_or(Precision::Binary64);
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols, prec);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                for j in 0..other.cols {
                    out.data[i * other.cols + j].add_mul_assign(a, &other[(k, j)]);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = x.first().map(|v| v.zero()).unwrap_or_else(|| self.data[0].zero());
                for (a, b) in self.row(i).iter().zip(x) {
                    acc.add_mul_assign(a, b);
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(Real::abs).fold(self.zero_elem(), T::max_of)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.rows).map(|i| sum_abs(self.row(i), self.zero_elem())).fold(self.zero_elem(), T::max_of)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..self.cols).map(|j| sum_abs(&self.col(j), self.zero_elem())).fold(self.zero_elem(), T::max_of)
    }

    /// `max |A_ij - A_ji|`; `None` for non-square matrices.
    pub fn asymmetry(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        let mut worst = self.zero_elem();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max_of((self[(i, j)].clone() - &self[(j, i)]).abs());
            }
        }
        Some(worst)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(Real::is_finite)
    }

    pub fn map_f64(&self) -> Vec<f64> {
        self.data.iter().map(Real::to_f64).collect()
    }

    fn zero_elem(&self) -> T {
        self.data.first().map(|v| v.zero()).unwrap_or_else(|| T::zero_at(Precision::Binary64))
    }
}

fn sum_abs<T: Real>(xs: &[T], zero: T) -> T {
    xs.iter().fold(zero, |acc, x| acc + x.abs())
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}
