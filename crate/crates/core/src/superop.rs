//! Linear maps on `nu x nu` matrices and their algebra.
//!
//! A superoperator `a` is stored as a `nu^2 x nu^2` matrix whose row index is
//! the output pair `(g, d)` and whose column index is the input pair `(al, be)`,
//! both flattened row-major (`g * nu + d`). With that layout
//!
//! * `a(A)_{gd} = sum_{al,be} a[(g,d),(al,be)] A_{al,be}` is a matrix-vector
//!   product on the row-major vectorisation of `A`;
//! * the up-down involution (adjoint for `<A, B> = tr(A* B)`) is the conjugate
//!   transpose of the stored matrix, so positivity is a PSD test;
//! * the diamond involution `a<>[(g,d),(al,be)] = a[(g,al),(d,be)]` is the
//!   Choi reshuffle, so complete positivity is a PSD test on `a<>`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig_tol, is_psd, loewner_leq, Matrix};
use crate::scalar::{Real, C};

#[derive(Clone, PartialEq)]
pub struct Superoperator<T> {
    dim: usize,
    mat: Matrix<T>,
}

impl<T: std::fmt::Debug> std::fmt::Debug for Superoperator<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Superoperator(nu={}) ", self.dim)?;
        self.mat.fmt(f)
    }
}

/// A Kraus representation `a(A) = sum_k M_k A M_k*`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet<T> {
    dim: usize,
    kraus: Vec<Matrix<T>>,
}

/// Classification of a superoperator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OperationClass {
    /// `a = b^ b` for some `b`, i.e. the stored matrix is Hermitian PSD.
    pub positive: bool,
    /// Completely positive: the Choi reshuffle is positive.
    pub cp: bool,
    /// `a(I) <= I`.
    pub sub_unital: bool,
    /// `a^(I) <= I`.
    pub sub_tracial: bool,
    /// `cp && sub_unital && sub_tracial`.
    pub operation: bool,
    /// An operation with `a(I) = I` and `a^(I) = I`.
    pub trivial: bool,
}

fn flat(nu: usize, i: usize, j: usize) -> usize {
    i * nu + j
}

impl<T: Real> Superoperator<T> {
    /// Wraps a `nu^2 x nu^2` matrix in the layout described in the module docs.
    pub fn from_matrix(dim: usize, mat: Matrix<T>) -> Result<Self> {
        if mat.dim() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: mat.dim(),
            });
        }
        Ok(Superoperator { dim, mat })
    }

    /// Like [`Superoperator::from_matrix`], inferring `nu` from a perfect-square size.
    pub fn from_tensor(mat: Matrix<T>) -> Result<Self> {
        let n = mat.dim();
        let nu = (n as f64).sqrt().round() as usize;
        if nu * nu != n {
            return Err(Error::DimensionMismatch {
                expected: nu * nu,
                found: n,
            });
        }
        Self::from_matrix(nu, mat)
    }

    /// `a_{gd}^{al be}`: coefficient of `A_{al be}` in `a(A)_{gd}`.
    pub fn entry(&self, g: usize, d: usize, al: usize, be: usize) -> C<T> {
        let nu = self.dim;
        self.mat[(flat(nu, g, d), flat(nu, al, be))]
    }

    fn from_entries(dim: usize, f: impl Fn(usize, usize, usize, usize) -> C<T>) -> Self {
        let mat = Matrix::from_fn(dim * dim, |row, col| {
            f(row / dim, row % dim, col / dim, col % dim)
        });
        Superoperator { dim, mat }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `nu^2 x nu^2` matrix.
    pub fn matrix(&self) -> &Matrix<T> {
        &self.mat
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    pub fn apply(&self, a: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_dim(a.dim())?;
        let out = self.mat.apply_vec(a.as_slice())?;
        Matrix::from_row_major(self.dim, out)
    }

    /// `self . other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        Ok(Superoperator {
            dim: self.dim,
            mat: &self.mat * &other.mat,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        Ok(Superoperator {
            dim: self.dim,
            mat: &self.mat + &other.mat,
        })
    }

    /// Multiplies by a nonnegative real. A factor above one can take an
    /// operation out of the operation class.
    pub fn scale(&self, factor: T) -> Result<Self> {
        if !factor.is_finite() || factor < T::zero() {
            return Err(Error::NegativeScale(factor.to_f64_lossy()));
        }
        Ok(Superoperator {
            dim: self.dim,
            mat: self.mat.scale_real(factor),
        })
    }

    /// Sum of a nonempty sequence of superoperators.
    pub fn sum<'a>(mut terms: impl Iterator<Item = &'a Self>) -> Result<Self> {
        let first = terms
            .next()
            .ok_or_else(|| Error::InvalidRequest("empty sum".into()))?
            .clone();
        terms.try_fold(first, |acc, t| acc.add(t))
    }

    /// `a<->(A) = [a(A*)]*`.
    pub fn invol_lr(&self) -> Self {
        Self::from_entries(self.dim, |g, d, al, be| self.entry(d, g, be, al).conj())
    }

    /// Adjoint with respect to `tr(A* B)`; the time reversal of `a`.
    pub fn invol_ud(&self) -> Self {
        Superoperator {
            dim: self.dim,
            mat: self.mat.adjoint(),
        }
    }

    /// Choi reshuffle.
    pub fn invol_diamond(&self) -> Self {
        Self::from_entries(self.dim, |g, d, al, be| self.entry(g, al, d, be))
    }

    /// `sum_{al,be} a_{al be}^{al be}`, the trace of the stored matrix.
    pub fn tr_ud(&self) -> C<T> {
        self.mat.trace()
    }

    /// `sum_{al,be} a_{be be}^{al al}`, equal to `tr a(I)`.
    pub fn tr_lr(&self) -> C<T> {
        let nu = self.dim;
        let mut acc = C::zero();
        for al in 0..nu {
            for be in 0..nu {
                acc = acc + self.entry(be, be, al, al);
            }
        }
        acc
    }

    /// Positivity in the `a = b^ b` sense: the stored matrix is Hermitian PSD.
    /// A non-Hermitian tensor is reported as not positive.
    pub fn is_positive(&self, tol: T) -> Result<bool> {
        if !self.mat.is_hermitian(tol) {
            return Ok(false);
        }
        is_psd(&self.mat, tol)
    }

    /// Complete positivity: the Choi reshuffle is positive.
    pub fn is_cp(&self, tol: T) -> Result<bool> {
        self.invol_diamond().is_positive(tol)
    }

    /// Kraus operators from the spectral decomposition of the Choi matrix.
    ///
    /// Every eigenvalue above `tol * max(1, top eigenvalue)` contributes
    /// `sqrt(lambda) * reshape(v)`. Kraus operators are determined only up to
    /// unitary mixing, so callers should compare reconstructions, not lists.
    pub fn extract_kraus(&self, tol: T) -> Result<KrausSet<T>> {
        let choi = self.invol_diamond();
        let not_cp = |min: T| Error::NotCp {
            min_eigenvalue: min.to_f64_lossy(),
        };
        if !choi.mat.is_hermitian(tol) {
            return Err(not_cp(T::nan()));
        }
        let eig = hermitian_eig_tol(&choi.mat, tol)?;
        let cutoff = tol * T::one().max(eig.max().abs());
        if eig.min() < -cutoff {
            return Err(not_cp(eig.min()));
        }
        let nu = self.dim;
        let mut kraus = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate().rev() {
            if lambda <= cutoff {
                break;
            }
            let weight = lambda.sqrt();
            let v = eig.eigenvector(k);
            kraus.push(Matrix::from_fn(nu, |g, d| v[flat(nu, g, d)] * weight));
        }
        Ok(KrausSet { dim: nu, kraus })
    }

    /// Classifies `a`, checking the operation property both directly and
    /// through the Kraus sums `sum M_k M_k* <= I`, `sum M_k* M_k <= I`.
    ///
    /// Triviality is tested as `a(I) = I` and `a^(I) = I` (operator norm
    /// within `tol`). That is equivalent to the "for every operation b"
    /// definition: `tr<->(ab) = tr[a^(I)* b(I)]` equals `tr b(I)` for all
    /// `b` exactly when `a^(I) = I`, and `tr<->(ba) = tr[b^(I)* a(I)]`
    /// handles `a(I) = I` the same way.
    pub fn classify(&self, tol: T) -> Result<OperationClass> {
        let id = Matrix::identity(self.dim);
        let positive = self.is_positive(tol)?;
        let cp = self.is_cp(tol)?;
        let image = self.apply(&id)?;
        let co_image = self.invol_ud().apply(&id)?;
        let below_identity = |m: &Matrix<T>| -> Result<bool> {
            if !m.is_hermitian(tol) {
                return Ok(false);
            }
            loewner_leq(m, &id, tol)
        };
        let sub_unital = below_identity(&image)?;
        let sub_tracial = below_identity(&co_image)?;
        let operation = cp && sub_unital && sub_tracial;

        if cp {
            let kraus = self.extract_kraus(tol)?;
            let via_kraus =
                below_identity(&kraus.sum_m_madj())? && below_identity(&kraus.sum_madj_m())?;
            if via_kraus != (sub_unital && sub_tracial) {
                return Err(Error::InvariantViolation(format!(
                    "operation test disagrees between Choi route ({}) and Kraus route ({via_kraus})",
                    sub_unital && sub_tracial
                )));
            }
        }

        let trivial =
            operation && (&image - &id).op_norm()? <= tol && (&co_image - &id).op_norm()? <= tol;
        Ok(OperationClass {
            positive,
            cp,
            sub_unital,
            sub_tracial,
            operation,
            trivial,
        })
    }

    /// The identity map `1`.
    pub fn unit(dim: usize) -> Self {
        Superoperator {
            dim,
            mat: Matrix::identity(dim * dim),
        }
    }

    /// The zero map `0: A -> O`.
    pub fn zero(dim: usize) -> Self {
        Superoperator {
            dim,
            mat: Matrix::zeros(dim * dim),
        }
    }

    /// `p: A -> P A P` for an orthogonal projector `P`.
    pub fn projecting(p: &Matrix<T>, tol: T) -> Result<Self> {
        let defect = p.max_abs_diff(&p.adjoint())?.max(p.max_abs_diff(&(p * p))?);
        if defect > tol {
            return Err(Error::NotProjector {
                defect: defect.to_f64_lossy(),
            });
        }
        Ok(Self::conjugation(p))
    }

    /// `u: A -> U A U*`.
    pub fn unitary(u: &Matrix<T>, tol: T) -> Result<Self> {
        check_unitary(u, tol)?;
        Ok(Self::conjugation(u))
    }

    /// `u^-1: A -> U* A U`.
    pub fn unitary_inv(u: &Matrix<T>, tol: T) -> Result<Self> {
        check_unitary(u, tol)?;
        Ok(Self::conjugation(&u.adjoint()))
    }

    /// `A -> M A M*` for an arbitrary `M`.
    pub fn conjugation(m: &Matrix<T>) -> Self {
        Self::from_entries(m.dim(), |g, d, al, be| m[(g, al)] * m[(d, be)].conj())
    }

    pub fn from_kraus(kraus: &KrausSet<T>) -> Self {
        let nu = kraus.dim;
        let mut mat = Matrix::zeros(nu * nu);
        for m in &kraus.kraus {
            mat = &mat + Self::conjugation(m).matrix();
        }
        Superoperator { dim: nu, mat }
    }

    pub fn cast<U: Real>(&self) -> Superoperator<U> {
        Superoperator {
            dim: self.dim,
            mat: self.mat.cast(),
        }
    }
}

fn check_unitary<T: Real>(u: &Matrix<T>, tol: T) -> Result<()> {
    let defect = (&u.adjoint() * u).max_abs_diff(&Matrix::identity(u.dim()))?;
    if defect > tol {
        return Err(Error::NotUnitary {
            defect: defect.to_f64_lossy(),
        });
    }
    Ok(())
}

impl<T: Real> KrausSet<T> {
    pub fn new(dim: usize, kraus: Vec<Matrix<T>>) -> Result<Self> {
        if let Some(bad) = kraus.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(KrausSet { dim, kraus })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[Matrix<T>] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    /// `{M_k*}`, a Kraus set for the time-reversed map.
    pub fn adjoint(&self) -> Self {
        KrausSet {
            dim: self.dim,
            kraus: self.kraus.iter().map(Matrix::adjoint).collect(),
        }
    }

    pub fn to_superoperator(&self) -> Superoperator<T> {
        Superoperator::from_kraus(self)
    }

    /// `sum_k M_k* M_k`, which equals `a^(I)`.
    pub fn sum_madj_m(&self) -> Matrix<T> {
        self.kraus
            .iter()
            .fold(Matrix::zeros(self.dim), |acc, m| &acc + &(&m.adjoint() * m))
    }

    /// `sum_k M_k M_k*`, which equals `a(I)`.
    pub fn sum_m_madj(&self) -> Matrix<T> {
        self.kraus
            .iter()
            .fold(Matrix::zeros(self.dim), |acc, m| &acc + &(m * &m.adjoint()))
    }

    /// `sum_k M_k A M_k*` without materialising the tensor.
    pub fn apply(&self, a: &Matrix<T>) -> Result<Matrix<T>> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            });
        }
        Ok(self.kraus.iter().fold(Matrix::zeros(self.dim), |acc, m| {
            &acc + &(&(m * a) * &m.adjoint())
        }))
    }
}

/// Real trace of a matrix, or `InvariantViolation` if the imaginary part
/// exceeds `tol` relative to the real part.
pub(crate) fn real_trace<T: Real>(z: C<T>, tol: T, what: &str) -> Result<T> {
    if z.im.abs() > tol * T::one().max(z.re.abs()) {
        return Err(Error::InvariantViolation(format!(
            "{what} has imaginary part {:e}",
            z.im.to_f64_lossy()
        )));
    }
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type S = Superoperator<f64>;
    type M = Matrix<f64>;
    const TOL: f64 = 1e-9;

    fn pz_plus() -> M {
        M::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap()
    }
    fn pz_minus() -> M {
        M::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap()
    }
    fn px_plus() -> M {
        M::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap()
    }

    fn transpose_map(nu: usize) -> S {
        S::from_entries(nu, |g, d, al, be| {
            if g == be && d == al {
                c(1.0)
            } else {
                C::zero()
            }
        })
    }

    #[test]
    fn matrix_units_read_back_tensor_columns() {
        let a = S::from_entries(2, |g, d, al, be| {
            C::new((g * 8 + d * 4 + al * 2 + be) as f64, (g + be) as f64)
        });
        for al in 0..2 {
            for be in 0..2 {
                let out = a.apply(&M::unit(2, al, be)).unwrap();
                for g in 0..2 {
                    for d in 0..2 {
                        assert_eq!(out[(g, d)], a.entry(g, d, al, be));
                    }
                }
            }
        }
    }

    #[test]
    fn apply_examples() {
        let a = M::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(S::unit(2).apply(&a).unwrap(), a);
        let p = S::projecting(&pz_plus(), TOL).unwrap();
        assert_eq!(p.apply(&M::identity(2)).unwrap(), pz_plus());
        assert_eq!(S::zero(2).apply(&a).unwrap(), M::zeros(2));
        assert!(matches!(
            S::unit(2).apply(&M::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let p = S::projecting(&pz_plus(), TOL).unwrap();
        assert_eq!(S::unit(2).compose(&p).unwrap(), p);
        assert_eq!(p.compose(&p).unwrap(), p);
        let px = S::projecting(&px_plus(), TOL).unwrap();
        let out = px.compose(&p).unwrap().apply(&M::identity(2)).unwrap();
        assert!(out.max_abs_diff(&px_plus().scale_real(0.5)).unwrap() < 1e-15);
    }

    #[test]
    fn trace_examples() {
        for nu in 1..5 {
            assert_eq!(S::unit(nu).tr_ud(), c((nu * nu) as f64));
            assert_eq!(S::unit(nu).tr_lr(), c(nu as f64));
        }
        let p = S::projecting(&pz_plus(), TOL).unwrap();
        assert_eq!(p.tr_lr(), c(1.0));
    }

    #[test]
    fn positivity_examples() {
        assert!(S::unit(2).is_positive(TOL).unwrap());
        let p = S::projecting(&pz_plus(), TOL).unwrap();
        assert!(p.is_positive(TOL).unwrap());
        assert!(S::zero(2).is_cp(TOL).unwrap());
        assert!(!transpose_map(2).is_cp(TOL).unwrap());
        // Choi matrix of the transpose is the swap, spectrum {-1, 1, 1, 1}.
        let choi = transpose_map(2).invol_diamond();
        let eig = crate::matcore::hermitian_eig(choi.matrix()).unwrap();
        assert!((eig.min() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn amplitude_damping_classification() {
        let k0 = M::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.7f64.sqrt()]]).unwrap();
        let k1 = M::from_real_rows(&[&[0.0, 0.3f64.sqrt()], &[0.0, 0.0]]).unwrap();
        let a = S::from_kraus(&KrausSet::new(2, vec![k0, k1]).unwrap());
        let cls = a.classify(TOL).unwrap();
        assert!(cls.cp);
        assert!(cls.sub_tracial);
        assert!(!cls.sub_unital);
        assert!(!cls.operation);
        assert!(!cls.trivial);
        let image = a.apply(&M::identity(2)).unwrap();
        assert!(image.max_abs_diff(&M::diag(&[1.3, 0.7])).unwrap() < 1e-15);
    }

    #[test]
    fn projector_and_unitary_classification() {
        let cls = S::projecting(&pz_plus(), TOL)
            .unwrap()
            .classify(TOL)
            .unwrap();
        assert!(cls.operation && !cls.trivial);
        let h = 0.5f64.sqrt();
        let had = M::from_real_rows(&[&[h, h], &[h, -h]]).unwrap();
        let cls = S::unitary(&had, TOL).unwrap().classify(TOL).unwrap();
        assert!(cls.operation && cls.trivial);
    }

    #[test]
    fn builders_reduce_to_unit() {
        assert_eq!(S::projecting(&M::identity(3), TOL).unwrap(), S::unit(3));
        assert_eq!(S::unitary(&M::identity(3), TOL).unwrap(), S::unit(3));
    }

    #[test]
    fn dephasing_is_trivial() {
        let d = S::projecting(&pz_plus(), TOL)
            .unwrap()
            .add(&S::projecting(&pz_minus(), TOL).unwrap())
            .unwrap();
        let cls = d.classify(TOL).unwrap();
        assert!(cls.trivial && cls.operation);
        assert_ne!(d, S::unit(2));
    }

    #[test]
    fn builder_errors() {
        let not_proj = M::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            S::projecting(&not_proj, TOL),
            Err(Error::NotProjector { .. })
        ));
        assert!(matches!(
            S::unitary(&M::diag(&[1.0, 2.0]), TOL),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            S::unit(2).scale(-0.5),
            Err(Error::NegativeScale(_))
        ));
        assert!(matches!(
            S::unit(2).add(&S::unit(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(S::from_tensor(M::identity(5)).is_err());
        assert_eq!(S::from_tensor(M::identity(9)).unwrap(), S::unit(3));
    }

    #[test]
    fn unit_extracts_single_kraus_operator() {
        let k = S::unit(3).extract_kraus(TOL).unwrap();
        assert_eq!(k.len(), 1);
        assert!(
            k.to_superoperator()
                .matrix()
                .max_abs_diff(S::unit(3).matrix())
                .unwrap()
                < 1e-12
        );
    }

    #[test]
    fn extract_kraus_rejects_non_cp() {
        assert!(matches!(
            transpose_map(2).extract_kraus(TOL),
            Err(Error::NotCp { .. })
        ));
    }

    #[test]
    fn up_down_of_unit_and_projector() {
        assert_eq!(S::unit(3).invol_ud(), S::unit(3));
        let p = S::projecting(&px_plus(), TOL).unwrap();
        assert!(p.invol_ud().matrix().max_abs_diff(p.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn lr_matches_conjugate_definition() {
        let a = S::from_entries(2, |g, d, al, be| {
            C::new(
                (g + 2 * d) as f64 - (al * be) as f64,
                (3 * al + be) as f64 - g as f64,
            )
        });
        let x = M::from_rows(vec![
            vec![C::new(1.0, 2.0), C::new(-0.5, 0.1)],
            vec![C::new(0.0, 3.0), C::new(2.0, -1.0)],
        ])
        .unwrap();
        let lhs = a.invol_lr().apply(&x).unwrap();
        let rhs = a.apply(&x.adjoint()).unwrap().adjoint();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
    }
}
