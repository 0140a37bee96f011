//! Exact integer linear algebra.
//!
//! Everything here works over `BigInt` so that intermediate growth during
//! Smith normal form reduction can never overflow. Small fixed-size checks
//! elsewhere in the crate use `Matrix<i64>` with the same API.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("NoKernel: matrix has trivial rational kernel")]
    NoKernel,
    #[error("NotRankDeficientByOne: kernel has dimension {0}")]
    NotRankDeficientByOne(usize),
    #[error("NoSolution: right-hand side is not in the integer image")]
    NoSolution,
    #[error("DimensionMismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

impl LinalgError {
    pub fn name(&self) -> &'static str {
        match self {
            LinalgError::NoKernel => "NoKernel",
            LinalgError::NotRankDeficientByOne(_) => "NotRankDeficientByOne",
            LinalgError::NoSolution => "NoSolution",
            LinalgError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Arbitrary-precision integer matrix.
pub type IntMatrix = Matrix<BigInt>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Matrix<T> {
    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>>
    where
        T: Clone,
    {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// `vᵗ · self`, returned as a plain vector.
    pub fn left_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows, "vector-matrix dimension mismatch");
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |acc, i| acc + &v[i] * &self[(i, j)]))
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T> Mul<&'a Matrix<T>> for &'a Matrix<T>
where
    T: Clone + Zero,
    for<'b> &'b T: Mul<&'b T, Output = T>,
{
    type Output = Matrix<T>;

    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a * &rhs[(k, j)];
                    let slot = &mut out[(i, j)];
                    *slot = std::mem::replace(slot, T::zero()) + prod;
                }
            }
        }
        out
    }
}

impl<'a, T> Add<&'a Matrix<T>> for &'a Matrix<T>
where
    for<'b> &'b T: Add<&'b T, Output = T>,
{
    type Output = Matrix<T>;

    fn add(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a, T> Sub<&'a Matrix<T>> for &'a Matrix<T>
where
    for<'b> &'b T: Sub<&'b T, Output = T>,
{
    type Output = Matrix<T>;

    fn sub(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>4}", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl From<&Matrix<i64>> for IntMatrix {
    fn from(m: &Matrix<i64>) -> Self {
        m.map(|&x| BigInt::from(x))
    }
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = num / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }
}

/// Smith normal form `u · m · v = d` with unimodular `u`, `v`.
///
/// `u_inv` is the exact inverse of `u`, tracked alongside the reduction so
/// that coordinates in the diagonal basis can be lifted back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// Diagonal entries `d[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, k: usize) {
        self.a.swap_rows(i, k);
        self.u.swap_rows(i, k);
        self.u_inv.swap_cols(i, k);
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        self.a.swap_cols(j, k);
        self.v.swap_cols(j, k);
    }

    /// row_i -= q * row_k
    fn row_axpy(&mut self, i: usize, k: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            for j in 0..m.cols() {
                let t = q * &m[(k, j)];
                m[(i, j)] -= t;
            }
        }
        // inverse op on u_inv: col_k += q * col_i
        let m = &mut self.u_inv;
        for r in 0..m.rows() {
            let t = q * &m[(r, i)];
            m[(r, k)] += t;
        }
    }

    /// col_j -= q * col_k
    fn col_axpy(&mut self, j: usize, k: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows() {
                let t = q * &m[(r, k)];
                m[(r, j)] -= t;
            }
        }
    }

    fn negate_row(&mut self, k: usize) {
        for m in [&mut self.a, &mut self.u] {
            for j in 0..m.cols() {
                let x = std::mem::take(&mut m[(k, j)]);
                m[(k, j)] = -x;
            }
        }
        let m = &mut self.u_inv;
        for r in 0..m.rows() {
            let x = std::mem::take(&mut m[(r, k)]);
            m[(r, k)] = -x;
        }
    }

    /// Nonzero entry of least absolute value in the trailing block, ties by
    /// row then column index.
    fn pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in k..self.a.rows() {
            for j in k..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[(bi, bj)].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn reduce(&mut self) {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        for k in 0..rows.min(cols) {
            let Some((pi, pj)) = self.pivot(k) else {
                break;
            };
            self.swap_rows(k, pi);
            self.swap_cols(k, pj);
            loop {
                // Clear column k below and row k to the right. Whenever a
                // remainder survives, move the smaller entry into the pivot.
                let mut dirty = false;
                for i in k + 1..rows {
                    if self.a[(i, k)].is_zero() {
                        continue;
                    }
                    let q = self.a[(i, k)].div_floor(&self.a[(k, k)]);
                    self.row_axpy(i, k, &q);
                    if !self.a[(i, k)].is_zero() {
                        dirty = true;
                    }
                }
                for j in k + 1..cols {
                    if self.a[(k, j)].is_zero() {
                        continue;
                    }
                    let q = self.a[(k, j)].div_floor(&self.a[(k, k)]);
                    self.col_axpy(j, k, &q);
                    if !self.a[(k, j)].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    let (pi, pj) = self.pivot_in_cross(k);
                    self.swap_rows(k, pi);
                    self.swap_cols(k, pj);
                    continue;
                }
                // Pivot must divide the whole trailing block.
                let bad = (k + 1..rows)
                    .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !self.a[(i, j)].is_multiple_of(&self.a[(k, k)]));
                match bad {
                    Some((i, _)) => {
                        // row_k += row_i
                        self.row_axpy(k, i, &BigInt::from(-1));
                    }
                    None => break,
                }
            }
            if self.a[(k, k)].is_negative() {
                self.negate_row(k);
            }
        }
    }

    /// Smallest nonzero entry on row k or column k (positions >= k).
    fn pivot_in_cross(&self, k: usize) -> (usize, usize) {
        let mut best = (k, k);
        let mut best_abs: Option<BigInt> = None;
        let mut consider = |i: usize, j: usize, best: &mut (usize, usize)| {
            let x = &self.a[(i, j)];
            if x.is_zero() {
                return;
            }
            let ax = x.abs();
            if best_abs.as_ref().is_none_or(|b| ax < *b) {
                best_abs = Some(ax);
                *best = (i, j);
            }
        };
        for i in k..self.a.rows() {
            consider(i, k, &mut best);
        }
        for j in k + 1..self.a.cols() {
            consider(k, j, &mut best);
        }
        best
    }
}

/// Smith normal form with unimodular transforms.
///
/// Pivots are chosen with minimal absolute value; ties break on the smallest
/// row index and then the smallest column index. The diagonal is nonnegative,
/// satisfies `d[i] | d[i+1]`, and all zeros come last.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let mut r = Reducer {
        a: m.clone(),
        u: IntMatrix::identity(m.rows()),
        u_inv: IntMatrix::identity(m.rows()),
        v: IntMatrix::identity(m.cols()),
    };
    r.reduce();
    SnfDecomposition {
        u: r.u,
        u_inv: r.u_inv,
        d: r.a,
        v: r.v,
    }
}

/// Primitive integer generator of a one-dimensional kernel, with its first
/// nonzero entry positive.
pub fn integer_kernel_primitive(m: &IntMatrix) -> Result<Vec<BigInt>, LinalgError> {
    let snf = smith_normal_form(m);
    let dim = m.cols() - snf.rank();
    match dim {
        0 => Err(LinalgError::NoKernel),
        1 => {
            let mut k = snf.v.column(m.cols() - 1);
            // Columns of a unimodular matrix are already primitive; the gcd
            // division only guards the invariant.
            let g = k.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            for x in k.iter_mut() {
                *x = &*x / &g;
            }
            if k.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                for x in k.iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            Ok(k)
        }
        d => Err(LinalgError::NotRankDeficientByOne(d)),
    }
}

/// Solves `m · x = b` over the integers.
///
/// When the kernel is nontrivial the returned representative has every free
/// coordinate set to zero in the Smith basis.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
    if b.len() != m.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: m.rows(),
            actual: b.len(),
        });
    }
    let snf = smith_normal_form(m);
    solve_with_snf(&snf, b)
}

/// Same as [`solve_integer`] against a precomputed decomposition.
pub fn solve_with_snf(snf: &SnfDecomposition, b: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
    let c = snf.u.mul_vec(b);
    let cols = snf.v.rows();
    let rank = snf.rank();
    if c[rank..].iter().any(|x| !x.is_zero()) {
        return Err(LinalgError::NoSolution);
    }
    let mut y = vec![BigInt::zero(); cols];
    for i in 0..rank {
        let (q, r) = c[i].div_rem(&snf.d[(i, i)]);
        if !r.is_zero() {
            return Err(LinalgError::NoSolution);
        }
        y[i] = q;
    }
    Ok(snf.v.mul_vec(&y))
}

pub fn big_vec(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}
