//! Bayesian a priori / a posteriori states as density matrices, and the
//! effect operators that turn conditional probabilities into expectations.
//!
//! For an operation `a != 0`:
//!
//! * the a priori state (input side) is `a^(I) / tr a^(I)`, representing
//!   `A -> tr a(A) / tr<->(a)` via `tr a(A) = conj tr[A* a^(I)]`;
//! * the a posteriori state (output side) is `a(I) / tr a(I)`, representing
//!   `A -> conj(tr a^(A*)) / tr<->(a) = tr[A a(I)] / tr<->(a)`.

use serde::{Deserialize, Serialize};

use crate::bayes::{condition_weight, require_operation};
use crate::error::{Error, Result};
use crate::instrument::{Instrument, OutcomeEvent};
use crate::matcore::{hermitian_eig, is_psd, loewner_leq, Matrix};
use crate::scalar::{Real, C};
use crate::superop::Superoperator;

/// Which end of the operation the state describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Input side; inferred by retrodiction from the outcome.
    Prior,
    /// Output side; the state right after the outcome.
    Posterior,
}

/// Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: Matrix<T>,
}

fn fine<T: Real>() -> T {
    T::default_tol() * T::from_f64_lossy(0.1)
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_hermitian(fine()) {
            return Err(Error::NotDensityMatrix(format!(
                "Hermitian defect {:e}",
                matrix.hermitian_defect().to_f64_lossy()
            )));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > fine() || tr.im.abs() > fine() {
            return Err(Error::NotDensityMatrix(format!(
                "trace {}{:+}i",
                tr.re, tr.im
            )));
        }
        if !is_psd(&matrix, T::default_tol())? {
            return Err(Error::NotDensityMatrix("not positive semidefinite".into()));
        }
        Ok(DensityMatrix { matrix })
    }

    /// Normalises a nonzero positive matrix by its trace.
    pub fn from_positive(matrix: &Matrix<T>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.is_nan() || tr <= T::zero() {
            return Err(Error::ZeroCondition {
                weight: tr.to_f64_lossy(),
            });
        }
        Self::new(matrix.scale_real(T::one() / tr))
    }

    /// `I / nu`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let nu = T::from_usize(dim).unwrap_or_else(T::one);
        DensityMatrix {
            matrix: Matrix::identity(dim).scale_real(T::one() / nu),
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `tr(rho A)`.
    pub fn expectation(&self, a: &Matrix<T>) -> Result<C<T>> {
        Ok(self.matrix.checked_mul(a)?.trace())
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        Ok(hermitian_eig(&self.matrix)?.eigenvalues)
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> T {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Hermitian `E` with `0 <= E <= I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect<T> {
    matrix: Matrix<T>,
}

impl<T: Real> Effect<T> {
    pub fn new(matrix: Matrix<T>, tol: T) -> Result<Self> {
        if !matrix.is_hermitian(tol) {
            return Err(Error::NotEffect("not Hermitian".into()));
        }
        if !is_psd(&matrix, tol)? {
            return Err(Error::NotEffect("not positive semidefinite".into()));
        }
        if !loewner_leq(&matrix, &Matrix::identity(matrix.dim()), tol)? {
            return Err(Error::NotEffect("exceeds the identity".into()));
        }
        Ok(Effect { matrix })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }
}

fn represented<T: Real>(
    a: &Superoperator<T>,
    direction: Direction,
    tol: T,
) -> Result<DensityMatrix<T>> {
    condition_weight(a, tol)?;
    let id = Matrix::identity(a.dim());
    let m = match direction {
        Direction::Prior => a.invol_ud().apply(&id)?,
        Direction::Posterior => a.apply(&id)?,
    };
    DensityMatrix::from_positive(&m)
}

/// Bayesian a priori state `a^(I) / tr a^(I)`.
pub fn state_prior<T: Real>(a: &Superoperator<T>, tol: T) -> Result<DensityMatrix<T>> {
    require_operation(a, tol, "a")?;
    represented(a, Direction::Prior, tol)
}

/// Bayesian a posteriori state `a(I) / tr a(I)`.
pub fn state_posterior<T: Real>(a: &Superoperator<T>, tol: T) -> Result<DensityMatrix<T>> {
    require_operation(a, tol, "a")?;
    represented(a, Direction::Posterior, tol)
}

pub fn state<T: Real>(
    a: &Superoperator<T>,
    direction: Direction,
    tol: T,
) -> Result<DensityMatrix<T>> {
    match direction {
        Direction::Prior => state_prior(a, tol),
        Direction::Posterior => state_posterior(a, tol),
    }
}

/// State of an instrument given that its outcome lies in `event`; equal to
/// the state of `sum_{alpha in event} I(alpha)`.
pub fn state_of_instrument<T: Real>(
    inst: &Instrument<T>,
    event: &OutcomeEvent,
    direction: Direction,
    tol: T,
) -> Result<DensityMatrix<T>> {
    if event.is_empty() {
        return Err(Error::ZeroCondition { weight: 0.0 });
    }
    state(&inst.sum_over(event)?, direction, tol)
}

/// `(M, M')` with `M = sum M_k* M_k = a^(I)` and `M' = sum M_k M_k* = a(I)`, so that
/// `P<-(a|b) = tr[rho<-_b M]` and `P->(a|b) = tr[rho->_b M']`.
pub fn effects_of<T: Real>(a: &Superoperator<T>, tol: T) -> Result<(Effect<T>, Effect<T>)> {
    require_operation(a, tol, "a")?;
    let id = Matrix::identity(a.dim());
    Ok((
        Effect::new(a.invol_ud().apply(&id)?, tol)?,
        Effect::new(a.apply(&id)?, tol)?,
    ))
}
