//! JSON-friendly representation: complex scalars as `[re, im]`, matrices as
//! row-major nested arrays.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::Error;
use crate::scalar::{Real, C};

/// A complex entry. Serializes as `[re, im]`; a bare number is accepted on
/// input as a real entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry<T> {
    Pair([T; 2]),
    Real(T),
}

impl<T: Real> From<Entry<T>> for C<T> {
    fn from(e: Entry<T>) -> Self {
        match e {
            Entry::Pair([re, im]) => Complex::new(re, im),
            Entry::Real(re) => Complex::new(re, T::zero()),
        }
    }
}

/// Unvalidated nested rows as read from a file.
pub type RawMatrix<T> = Vec<Vec<Entry<T>>>;

impl<T: Real> TryFrom<RawMatrix<T>> for Matrix<T> {
    type Error = Error;

    fn try_from(raw: RawMatrix<T>) -> Result<Self, Error> {
        Matrix::from_rows(
            raw.into_iter()
                .map(|row| row.into_iter().map(C::from).collect())
                .collect(),
        )
    }
}

impl<T: Real> From<&Matrix<T>> for RawMatrix<T> {
    fn from(m: &Matrix<T>) -> Self {
        m.rows()
            .map(|row| row.iter().map(|z| Entry::Pair([z.re, z.im])).collect())
            .collect()
    }
}

impl<T: Real + Serialize> Serialize for Matrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawMatrix::from(self).serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawMatrix::<T>::deserialize(d)?;
        Matrix::try_from(raw).map_err(serde::de::Error::custom)
    }
}
