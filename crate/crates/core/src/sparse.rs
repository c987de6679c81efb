//! Compressed sparse row storage for complex operators on a Fock basis.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{re, Real};

/// Rows at or above this count are multiplied in parallel.
const PARALLEL_ROWS: usize = 4096;

/// Square complex sparse matrix in CSR layout.
///
/// Entries are sorted by column inside each row and exact zeros are never
/// stored. `is_hermitian` is only set after the stored entries were checked
/// to satisfy `A = A†`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
    hermitian: bool,
}

impl<T: Real> SparseOperator<T> {
    /// Builds from `(row, col, value)` triplets. Duplicates are summed in
    /// insertion order, which keeps the result deterministic.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex<T>)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.max(c) + 1,
            });
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex<T>> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        let zero = re(T::zero());
        let mut kept_cols = Vec::with_capacity(cols.len());
        let mut kept_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != zero {
                row_ptr[r + 1] += 1;
                kept_cols.push(c);
                kept_vals.push(v);
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            dim,
            row_ptr,
            cols: kept_cols,
            vals: kept_vals,
            hermitian: false,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![T::one(); dim])
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[T]) -> Self {
        let dim = values.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for (i, &v) in values.iter().enumerate() {
            if v != T::zero() {
                cols.push(i);
                vals.push(re(v));
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Row `r` as `(column, value)` pairs.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => re(T::zero()),
        }
    }

    /// Main diagonal, including implicit zeros.
    pub fn diagonal_values(&self) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }

    /// `y = A x`
    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![re(T::zero()); self.dim];
        self.apply_into(x, &mut y);
        y
    }

    pub fn apply_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        assert_eq!(x.len(), self.dim, "vector length does not match operator");
        assert_eq!(y.len(), self.dim, "output length does not match operator");
        let row = |r: usize| {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            self.cols[span.clone()]
                .iter()
                .zip(&self.vals[span])
                .fold(re(T::zero()), |acc, (&c, &v)| acc + v * x[c])
        };
        if self.dim >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(|(r, out)| *out = row(r));
        } else {
            y.iter_mut().enumerate().for_each(|(r, out)| *out = row(r));
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let triplets = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        let mut out = Self::from_triplets(self.dim, triplets).expect("indices already in range");
        out.hermitian = self.hermitian;
        out
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        if s == re(T::zero()) {
            return Self::zero(self.dim);
        }
        out.hermitian = self.hermitian && s.im == T::zero();
        out
    }

    /// `self + s·other`
    pub fn add_scaled(&self, other: &Self, s: Complex<T>) -> Result<Self> {
        self.check_dim(other)?;
        let triplets = self
            .entries()
            .chain(other.entries().map(|(r, c, v)| (r, c, v * s)))
            .collect();
        let mut out = Self::from_triplets(self.dim, triplets)?;
        out.hermitian = self.hermitian && other.hermitian && s.im == T::zero();
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, re(T::one()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, re(-T::one()))
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut triplets = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    triplets.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.dim, triplets)
    }

    /// `AB + BA`
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.add(&other.matmul(self)?)
    }

    /// `AB − BA`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.vals.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// `max |A − B|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.max_abs())
    }

    /// `max |A − A†|` over all entries.
    pub fn hermiticity_defect(&self) -> T {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(T::zero(), T::max)
    }

    /// Checks `A = A†` to within `tol` and marks the operator Hermitian.
    /// Entries are symmetrized so that the stored matrix is exactly
    /// self-adjoint afterwards.
    pub fn into_hermitian(self, tol: T) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian {
                defect: defect.as_f64(),
            });
        }
        if defect == T::zero() {
            let mut out = self;
            out.hermitian = true;
            return Ok(out);
        }
        let half = re(T::lit(0.5));
        let triplets = self
            .entries()
            .map(|(r, c, v)| (r, c, v * half))
            .chain(self.entries().map(|(r, c, v)| (c, r, v.conj() * half)))
            .collect();
        let mut out = Self::from_triplets(self.dim, triplets)?;
        out.hermitian = true;
        Ok(out)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex<T>> {
        let mut out = vec![re(T::zero()); self.dim * self.dim];
        for (r, c, v) in self.entries() {
            out[r * self.dim + c] = v;
        }
        out
    }

    /// Dense row-major block on the given basis indices.
    pub fn dense_block(&self, indices: &[usize]) -> Vec<Complex<T>> {
        let mut position = vec![usize::MAX; self.dim];
        for (k, &i) in indices.iter().enumerate() {
            position[i] = k;
        }
        let n = indices.len();
        let mut out = vec![re(T::zero()); n * n];
        for (k, &i) in indices.iter().enumerate() {
            for (c, v) in self.row(i) {
                if position[c] != usize::MAX {
                    out[k * n + position[c]] = v;
                }
            }
        }
        out
    }

    /// Largest singular value, from a dense eigen-decomposition of `A†A`.
    pub fn spectral_norm(&self, dense_cap: usize) -> Result<T> {
        if self.dim > dense_cap {
            return Err(Error::DenseCap {
                dimension: self.dim,
                cap: dense_cap,
            });
        }
        let gram = self.adjoint().matmul(self)?;
        let values = T::hermitian_eigvals(self.dim, &gram.to_dense());
        Ok(values.last().copied().unwrap_or(T::zero()).max(T::zero()).sqrt())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// Small dense-vector helpers used across the crate.
pub mod vector {
    use num_complex::Complex;
    use rand::Rng;

    use crate::scalar::{re, Real};

    /// `⟨a, b⟩`, antilinear in `a`.
    pub fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
        a.iter().zip(b).fold(re(T::zero()), |acc, (x, y)| acc + x.conj() * y)
    }

    pub fn norm<T: Real>(a: &[Complex<T>]) -> T {
        a.iter().map(|x| x.norm_sqr()).fold(T::zero(), |s, x| s + x).sqrt()
    }

    /// `y += s·x`
    pub fn axpy<T: Real>(s: Complex<T>, x: &[Complex<T>], y: &mut [Complex<T>]) {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += s * xi);
    }

    pub fn scale<T: Real>(s: Complex<T>, x: &mut [Complex<T>]) {
        x.iter_mut().for_each(|v| *v *= s);
    }

    /// Scales to unit norm and returns the previous norm.
    pub fn normalize<T: Real>(x: &mut [Complex<T>]) -> T {
        let n = norm(x);
        if n > T::zero() {
            scale(re(T::one() / n), x);
        }
        n
    }

    /// Unit vector with independent uniform real and imaginary parts.
    pub fn random_unit<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
        loop {
            let mut v: Vec<Complex<T>> = (0..dim)
                .map(|_| Complex::new(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0))))
                .collect();
            if normalize(&mut v) > T::zero() {
                return v;
            }
        }
    }

    pub fn basis_vector<T: Real>(dim: usize, i: usize) -> Vec<Complex<T>> {
        let mut v = vec![re(T::zero()); dim];
        v[i] = re(T::one());
        v
    }
}
