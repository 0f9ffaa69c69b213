//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point type the algebra is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative tolerance used by predicates when the caller does not pass one.
    fn default_tol() -> Self;

    /// Absolute tolerance on `|a(I) - I|` when validating instrument sums.
    fn instrument_tol() -> Self;

    /// Off-diagonal mass (relative to the Frobenius norm) at which Jacobi stops.
    fn jacobi_tol() -> Self;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-9
    }

    fn instrument_tol() -> Self {
        1e-8
    }

    fn jacobi_tol() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-4
    }

    fn instrument_tol() -> Self {
        1e-4
    }

    fn jacobi_tol() -> Self {
        2e-6
    }
}

/// Complex number over a [`Real`].
pub type C<T> = Complex<T>;

pub(crate) fn c<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}
