//! Dense matrices over a [`Scalar`] with the handful of field operations the
//! lattice and polytope code needs.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::{Int, Rational, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self.data[r * self.cols + c])?;
            }
        }
        write!(f, "]")
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<T>]) -> Self {
        assert!(cols.iter().all(|c| c.len() == rows), "column length mismatch");
        Matrix::from_fn(rows, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> Vec<T> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|c| self.col(c)).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// Keeps the first `n` columns.
    pub fn take_cols(&self, n: usize) -> Self {
        Matrix::from_fn(self.rows, n, |r, c| self[(r, c)].clone())
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn is_identity(&self) -> bool
    where
        T: PartialEq,
    {
        self.rows == self.cols
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let v = &self[(r, c)];
                    if r == c {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(r, k)].clone() * other[(k, c)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for (k, x) in v.iter().enumerate() {
                    acc = acc + self[(r, k)].clone() * x.clone();
                }
                acc
            })
            .collect()
    }
}

pub fn dot<T: Clone + Zero + std::ops::Mul<Output = T>>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

impl<T: Scalar> Matrix<T> {
    /// Row echelon form by Gaussian elimination with largest-magnitude pivots.
    /// Returns the reduced matrix, pivot columns and the sign of the row permutation.
    fn echelon(&self) -> (Matrix<T>, Vec<usize>, bool) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut flipped = false;
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let mut best = row;
            for r in row..m.rows {
                if m[(r, col)].abs() > m[(best, col)].abs() {
                    best = r;
                }
            }
            if m[(best, col)].is_zero() {
                continue;
            }
            if best != row {
                for c in 0..m.cols {
                    m.data.swap(best * m.cols + c, row * m.cols + c);
                }
                flipped = !flipped;
            }
            let p = m[(row, col)].clone();
            for r in row + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].clone() / p.clone();
                for c in col..m.cols {
                    let v = m[(row, c)].clone() * f.clone();
                    m[(r, c)] = m[(r, c)].clone() - v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots, flipped)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let (m, pivots, flipped) = self.echelon();
        if pivots.len() < self.rows {
            return T::zero();
        }
        let mut d = T::one();
        for i in 0..self.rows {
            d = d * m[(i, i)].clone();
        }
        if flipped {
            -d
        } else {
            d
        }
    }

    /// Solves `self * x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        let aug = Matrix::from_fn(n, n + 1, |r, c| if c < n { self[(r, c)].clone() } else { b[r].clone() });
        let (m, pivots, _) = aug.echelon();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut acc = m[(i, n)].clone();
            for j in i + 1..n {
                acc = acc - m[(i, j)].clone() * x[j].clone();
            }
            x[i] = acc / m[(i, i)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<T>> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        let mut cols = Vec::with_capacity(n);
        // Gauss-Jordan on [A | I].
        let aug = Matrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else if c - n == r {
                T::one()
            } else {
                T::zero()
            }
        });
        let (mut m, pivots, _) = aug.echelon();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        for i in (0..n).rev() {
            let p = m[(i, i)].clone();
            for c in 0..2 * n {
                m[(i, c)] = m[(i, c)].clone() / p.clone();
            }
            for r in 0..i {
                let f = m[(r, i)].clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..2 * n {
                    let v = m[(i, c)].clone() * f.clone();
                    m[(r, c)] = m[(r, c)].clone() - v;
                }
            }
        }
        for c in 0..n {
            cols.push((0..n).map(|r| m[(r, n + c)].clone()).collect::<Vec<_>>());
        }
        Some(Matrix::from_columns(n, &cols))
    }
}

pub fn int_to_rational(m: &Matrix<Int>) -> Matrix<Rational> {
    m.map(|x| Rational::from_integer(x.clone()))
}

/// Returns the integer matrix when every entry of `m` is integral.
pub fn rational_to_int(m: &Matrix<Rational>) -> Option<Matrix<Int>> {
    if m.data.iter().all(|x| x.is_integer()) {
        Some(m.map(|x| x.to_integer()))
    } else {
        None
    }
}

pub fn int_det(m: &Matrix<BigInt>) -> BigInt {
    int_to_rational(m).det().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(|x| rat(x, 1)).collect()).collect())
    }

    #[test]
    fn det_and_inverse() {
        let a = q(vec![vec![2, 1], vec![7, 4]]);
        assert_eq!(a.det(), rat(1, 1));
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert_eq!(q(vec![vec![1, 2], vec![2, 4]]).det(), rat(0, 1));
        assert!(q(vec![vec![1, 2], vec![2, 4]]).inverse().is_none());
        assert_eq!(q(vec![vec![0, 1], vec![1, 0]]).det(), rat(-1, 1));
    }

    #[test]
    fn solve_and_rank() {
        let a = q(vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        let x = a.solve(&[rat(2, 1), rat(3, 1), rat(3, 1)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![rat(2, 1), rat(3, 1), rat(3, 1)]);
        assert_eq!(q(vec![vec![1, 2, 3], vec![2, 4, 6]]).rank(), 1);
    }

    #[test]
    fn float_instantiation() {
        let a: Matrix<f64> = Matrix::from_rows(vec![vec![4.0, 1.0], vec![1.0, 3.0]]);
        assert!((a.det() - 11.0).abs() < 1e-12);
        let x = a.solve(&[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-12);
    }
}
