//! Dense complex matrices, the Hermitian eigensolver and Loewner-order predicates.

mod eig;
mod matrix;
mod order;
pub mod wire;

pub(crate) use eig::hermitian_eig_tol;
pub use eig::{hermitian_eig, EigSystem, MAX_SWEEPS};
pub use matrix::Matrix;
pub use order::{is_psd, loewner_leq};
