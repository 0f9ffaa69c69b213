//! Random matrices, unitaries and operations for property tests and fixtures.
//!
//! Every generator takes the RNG explicitly so callers control seeding.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::instrument::Instrument;
use crate::matcore::Matrix;
use crate::scalar::{Real, C};
use crate::superop::{KrausSet, Superoperator};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
}

/// Ginibre matrix: i.i.d. complex Gaussian entries.
pub fn complex_matrix<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix<T> {
    Matrix::from_fn(dim, |_, _| gaussian(rng))
}

pub fn hermitian<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix<T> {
    let g = complex_matrix::<T, R>(dim, rng);
    (&g + &g.adjoint()).scale_real(T::from_f64_lossy(0.5))
}

/// `G G*` for a Ginibre `G`.
pub fn psd<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix<T> {
    let g = complex_matrix::<T, R>(dim, rng);
    &g * &g.adjoint()
}

/// Random density matrix (normalised Wishart).
pub fn density<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix<T> {
    let p = psd::<T, R>(dim, rng);
    let tr = p.trace().re;
    p.scale_real(T::one() / tr)
}

/// Haar-like unitary from Gram-Schmidt on the columns of a Ginibre matrix.
pub fn unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix<T> {
    let g = complex_matrix::<T, R>(dim, rng);
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<C<T>> = (0..dim).map(|i| g[(i, j)]).collect();
        // Two passes keep the columns orthonormal to rounding.
        for _ in 0..2 {
            for q in &cols {
                let proj = q
                    .iter()
                    .zip(&v)
                    .fold(C::<T>::new(T::zero(), T::zero()), |acc, (a, b)| {
                        acc + a.conj() * b
                    });
                for (x, y) in v.iter_mut().zip(q) {
                    *x = *x - *y * proj;
                }
            }
        }
        let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        for x in &mut v {
            *x = *x / norm;
        }
        cols.push(v);
    }
    Matrix::from_fn(dim, |i, j| cols[j][i])
}

/// Orthogonal projector onto `rank` columns of a random unitary.
pub fn projector<T: Real, R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Matrix<T> {
    let u = unitary::<T, R>(dim, rng);
    basis_projector(&u, &(0..rank).collect::<Vec<_>>())
}

/// Projector onto the span of the selected columns of a unitary.
pub fn basis_projector<T: Real>(u: &Matrix<T>, columns: &[usize]) -> Matrix<T> {
    Matrix::from_fn(u.dim(), |i, j| {
        columns
            .iter()
            .fold(C::new(T::zero(), T::zero()), |acc, &k| {
                acc + u[(i, k)] * u[(j, k)].conj()
            })
    })
}

/// Arbitrary (generally non-positive) superoperator with Gaussian tensor entries.
pub fn superoperator<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Superoperator<T> {
    Superoperator::from_matrix(dim, complex_matrix(dim * dim, rng)).expect("size is nu^2")
}

/// Completely positive map with `count` random Kraus operators (not rescaled).
pub fn cp_map<T: Real, R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> KrausSet<T> {
    let kraus = (0..count).map(|_| complex_matrix(dim, rng)).collect();
    KrausSet::new(dim, kraus).expect("uniform dimension")
}

/// Random operation: `1..=nu^2` Gaussian Kraus operators rescaled by
/// `1 / max(|sum M*M|, |sum MM*|, 1)` so both identity bounds hold.
pub fn operation_kraus<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> KrausSet<T> {
    let count = rng.random_range(1..=dim * dim);
    let raw = cp_map::<T, R>(dim, count, rng);
    let bound = raw
        .sum_madj_m()
        .op_norm()
        .expect("Jacobi converges on small Hermitian matrices")
        .max(raw.sum_m_madj().op_norm().expect("Jacobi converges"))
        .max(T::one());
    // A little slack keeps the result strictly inside the operation class.
    let factor = (T::one() / (bound * T::from_f64_lossy(1.0 + 1e-9))).sqrt();
    KrausSet::new(
        dim,
        raw.operators()
            .iter()
            .map(|m| m.scale_real(factor))
            .collect(),
    )
    .expect("uniform dimension")
}

pub fn operation<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Superoperator<T> {
    operation_kraus(dim, rng).to_superoperator()
}

/// Convex weights `w_1..w_k` (normalised exponentials).
pub fn convex_weights<T: Real, R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<T> {
    let raw: Vec<f64> = (0..k)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3)
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| T::from_f64_lossy(w / total)).collect()
}

/// `k` scalar multiples of the unit summing exactly to the unit. These are
/// the only resolutions of the unit by completely positive maps, since the
/// unit has a rank-one Choi matrix.
pub fn unit_resolution<T: Real, R: Rng + ?Sized>(
    dim: usize,
    k: usize,
    rng: &mut R,
) -> Vec<Superoperator<T>> {
    let unit = Superoperator::unit(dim);
    let weights = convex_weights::<T, R>(k, rng);
    let mut parts: Vec<Superoperator<T>> = weights
        .iter()
        .map(|&w| unit.scale(w).expect("nonnegative weight"))
        .collect();
    // Absorb rounding into the last term so the sum is the unit to the last bit.
    let partial =
        Superoperator::sum(parts[..k - 1].iter()).unwrap_or_else(|_| Superoperator::zero(dim));
    let last =
        Superoperator::from_matrix(dim, unit.matrix() - partial.matrix()).expect("same size");
    parts[k - 1] = last;
    parts
}

/// Random resolution with trivial sum and `k` nonzero parts (`k >= 2`): a
/// weighted Lüders measurement in a random basis plus weighted random
/// unitaries.
pub fn trivial_resolution<T: Real, R: Rng + ?Sized>(
    dim: usize,
    k: usize,
    rng: &mut R,
) -> Vec<Superoperator<T>> {
    assert!(k >= 1);
    let projective = rng.random_range(0..=k.min(dim));
    let unitaries = k - projective;
    let mut weights = convex_weights::<T, R>(usize::from(projective > 0) + unitaries, rng);
    let mut parts = Vec::with_capacity(k);
    if projective > 0 {
        let w = weights.remove(0);
        let basis = unitary::<T, R>(dim, rng);
        // Split the basis into `projective` nonempty blocks.
        let mut blocks: Vec<Vec<usize>> = (0..projective).map(|b| vec![b]).collect();
        for col in projective..dim {
            let b = rng.random_range(0..projective);
            blocks[b].push(col);
        }
        for block in blocks {
            let p = Superoperator::conjugation(&basis_projector(&basis, &block));
            parts.push(p.scale(w).expect("nonnegative weight"));
        }
    }
    for w in weights {
        let u = Superoperator::conjugation(&unitary::<T, R>(dim, rng));
        parts.push(u.scale(w).expect("nonnegative weight"));
    }
    parts
}

/// Random instrument in the form of [`trivial_resolution`] with labels `o0, o1, ...`.
pub fn instrument<T: Real, R: Rng + ?Sized>(
    dim: usize,
    outcomes: usize,
    rng: &mut R,
) -> Instrument<T> {
    let parts = trivial_resolution::<T, R>(dim, outcomes, rng);
    Instrument::new(
        parts
            .into_iter()
            .enumerate()
            .map(|(i, op)| (format!("o{i}"), op))
            .collect(),
        T::default_tol(),
    )
    .expect("trivial resolution is an instrument")
}
