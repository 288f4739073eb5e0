//! Small dense matrices and rank computations.
//!
//! Exact rank uses fraction-free (Bareiss) elimination over `BigInt`, so
//! every intermediate value is an integer minor of the input and no
//! rounding can hide a nonzero. Numerical rank thresholds the singular
//! values at `rows * eps * sigma_max`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<S>(&self, f: impl FnMut(&T) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = &T> + '_ {
        (0..self.rows).map(move |i| &self.data[i * self.cols + j])
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Exact rank by fraction-free Gaussian elimination.
///
/// Each division by the previous pivot is exact (Sylvester's identity), so
/// entries never leave the integers.
pub fn rank_exact(m: &Matrix<BigInt>) -> usize {
    // Eliminate along the shorter dimension for fewer row updates.
    let mut a = if m.rows() <= m.cols() {
        m.clone()
    } else {
        m.transpose()
    };
    let (rows, cols) = (a.rows(), a.cols());
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(rank, pivot);
        let p = a[(rank, col)].clone();
        for i in rank + 1..rows {
            let lead = a[(i, col)].clone();
            for j in col + 1..cols {
                let v = &p * &a[(i, j)] - &lead * &a[(rank, j)];
                debug_assert!((&v % &prev).is_zero(), "non-exact Bareiss division");
                a[(i, j)] = v / &prev;
            }
            a[(i, col)] = BigInt::zero();
        }
        prev = p;
        rank += 1;
    }
    rank
}

/// Numerical rank with the tolerance `rows * eps * sigma_max`.
///
/// Returns the rank together with the absolute tolerance actually used.
pub fn rank_numerical(m: &Matrix<f64>) -> (usize, f64) {
    rank_numerical_with(m, m.rows() as f64 * f64::EPSILON)
}

/// Numerical rank with a caller-supplied relative tolerance factor; a
/// singular value counts when it exceeds `rel_tol * sigma_max`.
pub fn rank_numerical_with(m: &Matrix<f64>, rel_tol: f64) -> (usize, f64) {
    if m.rows() == 0 || m.cols() == 0 {
        return (0, 0.0);
    }
    let dm = nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), &m.data);
    let sv = dm.singular_values();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let tol = rel_tol * smax;
    if smax == 0.0 {
        return (0, tol);
    }
    (sv.iter().filter(|&&s| s > tol).count(), tol)
}

/// Largest absolute entry, used as a cheap size indicator in reports.
pub fn max_abs_bits(m: &Matrix<BigInt>) -> u64 {
    m.data.iter().map(|x| x.abs().bits()).max().unwrap_or(0)
}
