//! Small dense matrices over [`Real`] scalars, enough for Jacobians and the
//! least-squares lifts through chart projections.

use crate::error::{Error, Result};
use crate::expr::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::from_f64(0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::from_f64(1.0);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let mut acc = T::from_f64(0.0);
                for (a, b) in row.iter().zip(v) {
                    acc = acc + *a * *b;
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat<T> {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Vertical concatenation.
    pub fn stack(blocks: &[Mat<T>]) -> Mat<T> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Mat { rows, cols, data }
    }

    /// Solves the square system `self · x = b` by Gaussian elimination with
    /// partial pivoting on the value parts.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut rhs = b.to_vec();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.value().abs())).max(1.0);
        for col in 0..n {
            let (piv, best) = (col..n)
                .map(|r| (r, a[r * n + col].value().abs()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= 1e-13 * scale {
                return Err(Error::Singular(best));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                rhs.swap(col, piv);
            }
            let inv = T::from_f64(1.0) / a[col * n + col];
            for r in (col + 1)..n {
                let factor = a[r * n + col] * inv;
                if factor.value() == 0.0 && factor.order() == 0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = a[r * n + j] - factor * a[col * n + j];
                }
                rhs[r] = rhs[r] - factor * rhs[col];
            }
        }
        let mut x = vec![T::from_f64(0.0); n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for j in (i + 1)..n {
                acc = acc - a[i * n + j] * x[j];
            }
            x[i] = acc / a[i * n + i];
        }
        Ok(x)
    }

    /// Least-squares solution of `self · x ≈ b` through the normal equations.
    /// Requires full column rank.
    pub fn solve_least_squares(&self, b: &[T]) -> Result<Vec<T>> {
        let at = self.transpose();
        at.mul(self).solve(&at.mul_vec(b))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl Mat<f64> {
    pub fn max_abs_diff(&self, other: &Mat<f64>) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Max-abs difference of two vectors.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::Jet;

    #[test]
    fn solve_small_system() {
        let a = Mat::from_rows(2, 2, vec![0.0, 2.0, 1.0, 1.0]);
        let x = a.solve(&[4.0, 3.0]).unwrap();
        assert!(max_abs_diff(&x, &[1.0, 2.0]) < 1e-15);
    }

    #[test]
    fn singular_is_rejected() {
        let a = Mat::from_rows(2, 2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(a.solve(&[1.0, 1.0]), Err(Error::Singular(_))));
    }

    #[test]
    fn least_squares_recovers_consistent_solution() {
        // [I; I] x = [b; b]
        let a = Mat::from_rows(4, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        let x = a.solve_least_squares(&[3.0, -1.0, 3.0, -1.0]).unwrap();
        assert!(max_abs_diff(&x, &[3.0, -1.0]) < 1e-14);
    }

    #[test]
    fn solve_differentiates_through_jets() {
        // (t) x = 1  =>  x = 1/t, dx/dt = -1/t²
        let t = Jet::seeded(2.0, 0);
        let a = Mat::from_rows(1, 1, vec![t]);
        let x = a.solve(&[Jet::constant(1.0)]).unwrap();
        assert_eq!(x[0].value(), 0.5);
        assert_eq!(x[0].derivative(0), -0.25);
    }
}
