//! Positivity and the Loewner order on Hermitian matrices.

use super::eig::hermitian_eig_tol;
use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// True iff the smallest eigenvalue is `>= -tol * max(1, |largest eigenvalue|)`.
pub fn is_psd<T: Real>(m: &Matrix<T>, tol: T) -> Result<bool> {
    let e = hermitian_eig_tol(m, tol)?;
    Ok(e.min() >= -tol * T::one().max(e.max().abs()))
}

/// `a <= b` in the Loewner order, i.e. `b - a` is positive semidefinite.
pub fn loewner_leq<T: Real>(a: &Matrix<T>, b: &Matrix<T>, tol: T) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    for m in [a, b] {
        if !m.is_hermitian(tol) {
            return Err(Error::NotHermitian {
                defect: m.hermitian_defect().to_f64_lossy(),
            });
        }
    }
    is_psd(&(b - a), tol)
}
