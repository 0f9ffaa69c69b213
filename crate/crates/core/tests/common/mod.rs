#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retrodict::{Matrix64, Superoperator64};

pub const TOL: f64 = 1e-9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real(rows: &[&[f64]]) -> Matrix64 {
    Matrix64::from_real_rows(rows).unwrap()
}

pub fn pz_plus() -> Matrix64 {
    real(&[&[1.0, 0.0], &[0.0, 0.0]])
}

pub fn pz_minus() -> Matrix64 {
    real(&[&[0.0, 0.0], &[0.0, 1.0]])
}

pub fn px_plus() -> Matrix64 {
    real(&[&[0.5, 0.5], &[0.5, 0.5]])
}

pub fn px_minus() -> Matrix64 {
    real(&[&[0.5, -0.5], &[-0.5, 0.5]])
}

pub fn proj(p: &Matrix64) -> Superoperator64 {
    Superoperator64::projecting(p, TOL).unwrap()
}

/// Elementwise distance between two superoperators.
pub fn dist(a: &Superoperator64, b: &Superoperator64) -> f64 {
    a.matrix().max_abs_diff(b.matrix()).unwrap()
}

pub fn scale_of(a: &Superoperator64) -> f64 {
    a.matrix().max_abs().max(1.0)
}
