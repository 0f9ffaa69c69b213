use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{c, Real, C};

/// Dense square complex matrix stored row-major.
///
/// Construction checks that every entry is finite; all arithmetic produces a
/// new value, so a `Matrix` never changes after it is built.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { c(T::one()) } else { C::zero() })
    }

    /// Matrix unit `E_{row,col}`: a single one at `(row, col)`.
    pub fn unit(dim: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.data[row * dim + col] = c(T::one());
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { c(values[i]) } else { C::zero() })
    }

    /// Builds from a closure; the closure must return finite values.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    pub fn from_row_major(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let m = Matrix { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Self::from_row_major(n, data)
    }

    /// Real-valued rows; handy for fixtures and tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| c(T::from_f64_lossy(x))).collect())
                .collect(),
        )
    }

    fn check_finite(&self) -> Result<()> {
        match self
            .data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            Some(k) => Err(Error::NonFinite {
                row: k / self.dim,
                col: k % self.dim,
            }),
            None => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C<T>]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.map(|z| z.scale(factor))
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut out = vec![C::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik.is_zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o = *o + aik * b;
                }
            }
        }
        Ok(Matrix { dim: n, data: out })
    }

    fn zip(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Matrix-vector product.
    pub fn apply_vec(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(C::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect())
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    /// `trace / dim`, the normalized trace.
    pub fn normalized_trace(&self) -> C<T> {
        self.trace() / T::from_usize(self.dim).unwrap_or_else(T::one)
    }

    /// Normalized Hilbert-Schmidt pairing `tau(A* B)`.
    pub fn hs_inner(&self, other: &Self) -> Result<C<T>> {
        self.same_dim(other)?;
        Ok(self.hs_inner_unnormalized(other)? / T::from_usize(self.dim).unwrap_or_else(T::one))
    }

    /// Unnormalized pairing `tr(A* B)`.
    pub fn hs_inner_unnormalized(&self, other: &Self) -> Result<C<T>> {
        self.same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(C::zero(), |acc, (&a, &b)| acc + a.conj() * b))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Operator norm (largest singular value), via the spectrum of `A* A`.
    pub fn op_norm(&self) -> Result<T> {
        let gram = &self.adjoint() * self;
        let top = super::eig::jacobi(&gram)?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or_else(T::zero);
        Ok(top.max(T::zero()).sqrt())
    }

    /// Frobenius norm of `A - A*`.
    pub fn hermitian_defect(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Whether `A` is Hermitian at relative tolerance `tol`.
    ///
    /// Uses `|A - A*|_F <= tol * max(1, max|A_ij|)`, which implies the
    /// operator-norm form of the same bound.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_defect() <= tol * T::one().max(self.max_abs())
    }

    /// `max_ij |A_ij - B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm())))
    }

    /// Casts every entry to another scalar type.
    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| {
                    Complex::new(
                        U::from_f64_lossy(z.re.to_f64_lossy()),
                        U::from_f64_lossy(z.im.to_f64_lossy()),
                    )
                })
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;

    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

// Operator forms panic on dimension mismatch; use the `checked_*` methods
// when dimensions come from untrusted input.
impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_mul(rhs).expect("matrix dimensions agree")
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_add(rhs).expect("matrix dimensions agree")
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_sub(rhs).expect("matrix dimensions agree")
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|z| -z)
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim.max(1)) {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6?}{:+.6?}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
