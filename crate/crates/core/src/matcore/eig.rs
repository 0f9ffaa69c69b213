//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex;
use num_traits::Zero;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{c, Real, C};

/// Sweep budget for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with eigenvectors as the columns of a
/// unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigSystem<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> EigSystem<T> {
    /// `V diag(lambda) V*`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        Matrix::from_fn(n, |i, j| {
            (0..n).fold(C::zero(), |acc, k| {
                acc + v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k]
            })
        })
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<C<T>> {
        (0..self.eigenvalues.len())
            .map(|i| self.eigenvectors[(i, k)])
            .collect()
    }

    pub fn min(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian at the scalar's default relative tolerance;
/// otherwise `NotHermitian` is returned.
pub fn hermitian_eig<T: Real>(m: &Matrix<T>) -> Result<EigSystem<T>> {
    hermitian_eig_tol(m, T::default_tol())
}

pub(crate) fn hermitian_eig_tol<T: Real>(m: &Matrix<T>, tol: T) -> Result<EigSystem<T>> {
    if !m.is_hermitian(tol) {
        return Err(Error::NotHermitian {
            defect: m.hermitian_defect().to_f64_lossy(),
        });
    }
    jacobi(m)
}

/// Jacobi iteration on the Hermitian part of `m`, without the precondition check.
pub(crate) fn jacobi<T: Real>(m: &Matrix<T>) -> Result<EigSystem<T>> {
    let n = m.dim();
    let half = T::from_f64_lossy(0.5);
    // Work on (M + M*)/2 so tiny asymmetries never leak into the rotations.
    let mut a: Vec<C<T>> = Matrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * half)
        .as_slice()
        .to_vec();
    for i in 0..n {
        a[i * n + i] = c(a[i * n + i].re);
    }
    let mut v: Vec<C<T>> = Matrix::<T>::identity(n).as_slice().to_vec();

    let scale = a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
    let target = T::jacobi_tol() * scale;
    let negligible = T::epsilon() * T::from_f64_lossy(1e-3) * scale;

    let off_diagonal = |a: &[C<T>]| {
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc = acc + a[i * n + j].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let mut sweeps = 0;
    while !scale.is_zero() {
        if off_diagonal(&a) <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: (off_diagonal(&a) / scale).to_f64_lossy(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q, negligible);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i]
            .re
            .partial_cmp(&a[j * n + j].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&k| a[k * n + k].re).collect();
    let eigenvectors = Matrix::from_fn(n, |i, j| v[i * n + order[j]]);
    Ok(EigSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate<T: Real>(a: &mut [C<T>], v: &mut [C<T>], n: usize, p: usize, q: usize, negligible: T) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag.is_zero() {
        return;
    }
    if mag < negligible {
        a[p * n + q] = C::zero();
        a[q * n + p] = C::zero();
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let two = T::one() + T::one();
    let theta = (aqq - app) / (two * mag);
    let t = if theta.abs() > T::from_f64_lossy(1e150) {
        T::one() / (two * theta)
    } else {
        let sign = if theta < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        sign / (theta.abs() + theta.hypot(T::one()))
    };
    let cs = T::one() / t.hypot(T::one());
    let sn = t * cs;
    let phase = apq / mag;
    let phase_c = phase.conj();

    // J = diag(1, conj(phase)) * R(c, s) restricted to the (p, q) plane.
    let jpp = c(cs);
    let jpq = c(sn);
    let jqp = phase_c * (-sn);
    let jqq = phase_c * cs;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * jpp + akq * jqp;
        a[k * n + q] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let xpk = a[p * n + k];
        let xqk = a[q * n + k];
        a[p * n + k] = jpp.conj() * xpk + jqp.conj() * xqk;
        a[q * n + k] = jpq.conj() * xpk + jqq.conj() * xqk;
    }
    a[p * n + q] = C::zero();
    a[q * n + p] = C::zero();
    a[p * n + p] = Complex::new(app - t * mag, T::zero());
    a[q * n + q] = Complex::new(aqq + t * mag, T::zero());

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * jpp + vkq * jqp;
        v[k * n + q] = vkp * jpq + vkq * jqq;
    }
}
