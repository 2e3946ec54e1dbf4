//! Small dense row-major matrices over a generic real scalar.
//!
//! Spectral routines (general eigenproblems, SVD) go through `nalgebra` in
//! double precision and are converted back to the working scalar.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
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

    pub fn diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
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

    /// Builds from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn from_f64_rows(rows: &[&[f64]]) -> Self {
        let nested: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect();
        Self::from_rows(&nested)
    }

    pub fn scalar(x: T) -> Self {
        Self { rows: 1, cols: 1, data: vec![x] }
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

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| half * (self[(i, j)] + self[(j, i)]))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `vᵀ M` as a vector.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len(), "vector-matrix dimension mismatch");
        (0..self.cols).map(|j| (0..self.rows).map(|i| v[i] * self[(i, j)]).sum()).collect()
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        dot(u, &self.mul_vec(v))
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(T::min_positive_value());
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].abs().partial_cmp(&a[(y, col)].abs()).unwrap())
                .unwrap();
            if a[(pivot, col)].abs() <= scale * T::epsilon() * T::lit(n as f64) {
                return Err(Error::Singular);
            }
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / p;
                inv[(col, j)] = inv[(col, j)] / p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let factor = a[(i, col)];
                if factor == T::zero() {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] - factor * a[(col, j)];
                    inv[(i, j)] = inv[(i, j)] - factor * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        Ok(self.inverse()?.mul_vec(b))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Matrix exponential by scaling and squaring of a Taylor series.
    pub fn expm(&self) -> Self {
        let norm = self.norm_inf().as_f64();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let a = self.scale(T::lit(0.5f64.powi(squarings as i32)));
        let mut term = Self::identity(self.rows);
        let mut sum = term.clone();
        for k in 1..=30 {
            term = (&term * &a).scale(T::one() / T::lit(k as f64));
            sum = &sum + &term;
            if term.max_abs() <= T::epsilon() * sum.max_abs() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        let s = to_na(self).singular_values();
        T::lit(s.iter().cloned().fold(0.0, f64::max))
    }

    /// Spectral radius from the complex eigenvalues.
    pub fn spectral_radius(&self) -> T {
        let m = to_na(self);
        T::lit(m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
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

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        Matrix::from_fn(self.rows, rhs.cols, |i, j| (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x)
    }
}

pub fn dot<T: Real>(u: &[T], v: &[T]) -> T {
    assert_eq!(u.len(), v.len(), "dot dimension mismatch");
    u.iter().zip(v).map(|(&a, &b)| a * b).sum()
}

pub fn axpy<T: Real>(alpha: T, x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&a, &b)| alpha * a + b).collect()
}

pub fn sub<T: Real>(u: &[T], v: &[T]) -> Vec<T> {
    u.iter().zip(v).map(|(&a, &b)| a - b).collect()
}

pub fn norm_inf<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

pub fn norm2<T: Real>(v: &[T]) -> T {
    dot(v, v).sqrt()
}

pub(crate) fn to_na<T: Real>(m: &Matrix<T>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows, m.cols, |i, j| m[(i, j)].as_f64())
}

/// Eigendecomposition of a real-diagonalizable matrix.
#[derive(Clone, Debug)]
pub struct RealEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: Matrix<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenFailure {
    NonReal,
    Defective,
}

/// Real eigendecomposition `A = Q diag(values) Q⁻¹` of a general square matrix.
///
/// Eigenvalues come from a Schur factorization; eigenvectors of each
/// eigenvalue cluster span the numerical null space of `A - λI`, so repeated
/// eigenvalues are accepted as long as the geometric multiplicity matches.
pub fn real_eigen<T: Real>(a: &Matrix<T>) -> std::result::Result<RealEigen<T>, EigenFailure> {
    assert!(a.is_square(), "eigendecomposition needs a square matrix");
    let n = a.rows();
    let m = to_na(a);
    let scale = 1.0 + m.iter().fold(0.0f64, |s, x| s.max(x.abs())) * n as f64;
    if a.is_symmetric() {
        let se = m.clone().symmetric_eigen();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&x, &y| se.eigenvalues[x].partial_cmp(&se.eigenvalues[y]).unwrap());
        let values = idx.iter().map(|&i| T::lit(se.eigenvalues[i])).collect();
        let vectors = Matrix::from_fn(n, n, |i, j| T::lit(se.eigenvectors[(i, idx[j])]));
        return Ok(RealEigen { values, vectors });
    }
    let tol = 1e-7 * scale;
    let eig = m.complex_eigenvalues();
    if eig.iter().any(|z| z.im.abs() > tol) {
        return Err(EigenFailure::NonReal);
    }
    let mut reals: Vec<f64> = eig.iter().map(|z| z.re).collect();
    reals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for lam in reals {
        match clusters.last_mut() {
            Some(c) if (lam - c[c.len() - 1]).abs() <= tol => c.push(lam),
            _ => clusters.push(vec![lam]),
        }
    }
    let mut values = Vec::with_capacity(n);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    for c in clusters {
        let lam = c.iter().sum::<f64>() / c.len() as f64;
        let shifted = &m - DMatrix::identity(n, n) * lam;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.expect("requested right singular vectors");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| svd.singular_values[x].partial_cmp(&svd.singular_values[y]).unwrap());
        for &k in order.iter().take(c.len()) {
            if svd.singular_values[k] > 1e-6 * scale {
                return Err(EigenFailure::Defective);
            }
            values.push(T::lit(lam));
            columns.push(vt.row(k).iter().cloned().collect());
        }
    }
    let vectors = Matrix::from_fn(n, n, |i, j| T::lit(columns[j][i]));
    if vectors.inverse().is_err() {
        return Err(EigenFailure::Defective);
    }
    Ok(RealEigen { values, vectors })
}
