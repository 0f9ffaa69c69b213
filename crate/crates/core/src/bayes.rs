//! Predictive and retrodictive Bayesian probabilities over operations.
//!
//! For operations `a`, `b` with `b != 0`:
//!
//! * predictive `P<-(a|b) = tr<->(ab) / tr<->(b)`: `a` fires right after `b` fired;
//! * retrodictive `P->(a|b) = tr<->(ba) / tr<->(b)`: `a` fired right before `b` fires;
//! * unconditional `P(a) = tr<->(a) / nu`.
//!
//! Here `ab` means "apply `b`, then `a`" and `tr<->(a) = tr a(I)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::superop::{real_trace, Superoperator};

/// Largest resolution accepted by the Bayes-type theorem.
pub const MAX_RESOLUTION: usize = 10_000;

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize)]
pub struct Probability<T>(T);

impl<T: Real> Probability<T> {
    /// Accepts `value` within `tol` of `[0, 1]`, clamping onto the interval.
    /// Anything further out is a numerical bug and is reported as such.
    pub fn from_value(value: T, tol: T) -> Result<Self> {
        if !value.is_finite() || value < -tol || value > T::one() + tol {
            return Err(Error::InvariantViolation(format!(
                "probability {value} outside [0, 1]"
            )));
        }
        Ok(Probability(value.max(T::zero()).min(T::one())))
    }

    pub fn value(self) -> T {
        self.0
    }
}

impl<T: Real> fmt::Display for Probability<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

fn ratio<T: Real>(num: C<T>, den: T, tol: T) -> Result<Probability<T>> {
    let q = num / den;
    if q.im.abs() > tol {
        return Err(Error::InvariantViolation(format!(
            "probability has imaginary part {:e}",
            q.im.to_f64_lossy()
        )));
    }
    Probability::from_value(q.re, tol)
}

pub(crate) fn require_operation<T: Real>(a: &Superoperator<T>, tol: T, what: &str) -> Result<()> {
    if a.classify(tol)?.operation {
        Ok(())
    } else {
        Err(Error::NotOperation(what.to_string()))
    }
}

/// `tr<->(b)`, required to exceed `tol`.
pub(crate) fn condition_weight<T: Real>(b: &Superoperator<T>, tol: T) -> Result<T> {
    let w = real_trace(b.tr_lr(), tol, "tr<->")?;
    if w <= tol {
        return Err(Error::ZeroCondition {
            weight: w.to_f64_lossy(),
        });
    }
    Ok(w)
}

/// Predictive probability `P<-(a|b)`.
pub fn p_pred<T: Real>(
    a: &Superoperator<T>,
    b: &Superoperator<T>,
    tol: T,
) -> Result<Probability<T>> {
    require_operation(a, tol, "a")?;
    require_operation(b, tol, "b")?;
    pred_unchecked(a, b, tol)
}

fn pred_unchecked<T: Real>(
    a: &Superoperator<T>,
    b: &Superoperator<T>,
    tol: T,
) -> Result<Probability<T>> {
    let w = condition_weight(b, tol)?;
    ratio(a.compose(b)?.tr_lr(), w, tol)
}

/// Retrodictive probability `P->(a|b)`.
pub fn p_retro<T: Real>(
    a: &Superoperator<T>,
    b: &Superoperator<T>,
    tol: T,
) -> Result<Probability<T>> {
    require_operation(a, tol, "a")?;
    require_operation(b, tol, "b")?;
    retro_unchecked(a, b, tol)
}

fn retro_unchecked<T: Real>(
    a: &Superoperator<T>,
    b: &Superoperator<T>,
    tol: T,
) -> Result<Probability<T>> {
    let w = condition_weight(b, tol)?;
    ratio(b.compose(a)?.tr_lr(), w, tol)
}

/// Unconditional probability `P(a) = tr<->(a) / nu`, the statistics of `a`
/// applied to the maximally mixed state.
pub fn p_prior<T: Real>(a: &Superoperator<T>, tol: T) -> Result<Probability<T>> {
    require_operation(a, tol, "a")?;
    prior_unchecked(a, tol)
}

fn prior_unchecked<T: Real>(a: &Superoperator<T>, tol: T) -> Result<Probability<T>> {
    let nu = T::from_usize(a.dim()).unwrap_or_else(T::one);
    ratio(a.tr_lr(), nu, tol)
}

/// Validated inputs for both directions of the Bayes-type theorem.
struct Resolution<'a, T> {
    parts: &'a [Superoperator<T>],
    priors: Vec<T>,
}

fn resolution<'a, T: Real>(
    parts: &'a [Superoperator<T>],
    b: &Superoperator<T>,
    j: usize,
    tol: T,
) -> Result<Resolution<'a, T>> {
    if parts.is_empty() || parts.len() > MAX_RESOLUTION {
        return Err(Error::ResolutionSize(parts.len()));
    }
    if j >= parts.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: parts.len(),
        });
    }
    for (k, a) in parts.iter().enumerate() {
        require_operation(a, tol, &format!("resolution part {k}"))?;
    }
    require_operation(b, tol, "b")?;
    let total = Superoperator::sum(parts.iter())?;
    if !total.classify(tol)?.trivial {
        let id = crate::matcore::Matrix::identity(b.dim());
        return Err(Error::NotResolution {
            unital_defect: (&total.apply(&id)? - &id).op_norm()?.to_f64_lossy(),
            tracial_defect: (&total.invol_ud().apply(&id)? - &id)
                .op_norm()?
                .to_f64_lossy(),
        });
    }
    if prior_unchecked(b, tol)?.value() <= tol {
        return Err(Error::ZeroCondition {
            weight: b.tr_lr().re.to_f64_lossy(),
        });
    }
    let priors = parts
        .iter()
        .map(|a| {
            condition_weight(a, tol)?;
            prior_unchecked(a, tol).map(Probability::value)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Resolution { parts, priors })
}

/// Right-hand side of `P->(a_j|b) = P<-(b|a_j) P(a_j) / sum_k P<-(b|a_k) P(a_k)`.
///
/// The parts must sum to a trivial operation (the unit in particular).
pub fn bayes_retrodict<T: Real>(
    parts: &[Superoperator<T>],
    b: &Superoperator<T>,
    j: usize,
    tol: T,
) -> Result<Probability<T>> {
    let r = resolution(parts, b, j, tol)?;
    let terms = r
        .parts
        .iter()
        .zip(&r.priors)
        .map(|(a, &pa)| Ok(pred_unchecked(b, a, tol)?.value() * pa))
        .collect::<Result<Vec<T>>>()?;
    weighted_share(&terms, j, tol)
}

/// Right-hand side of `P<-(a_j|b) = P->(b|a_j) P(a_j) / sum_k P->(b|a_k) P(a_k)`.
pub fn bayes_predict<T: Real>(
    parts: &[Superoperator<T>],
    b: &Superoperator<T>,
    j: usize,
    tol: T,
) -> Result<Probability<T>> {
    let r = resolution(parts, b, j, tol)?;
    let terms = r
        .parts
        .iter()
        .zip(&r.priors)
        .map(|(a, &pa)| Ok(retro_unchecked(b, a, tol)?.value() * pa))
        .collect::<Result<Vec<T>>>()?;
    weighted_share(&terms, j, tol)
}

fn weighted_share<T: Real>(terms: &[T], j: usize, tol: T) -> Result<Probability<T>> {
    let total = terms.iter().fold(T::zero(), |acc, &t| acc + t);
    if total <= tol * tol {
        return Err(Error::ZeroCondition {
            weight: total.to_f64_lossy(),
        });
    }
    Probability::from_value(terms[j] / total, tol)
}

/// Time reversal `a^` of an operation.
pub fn time_reverse<T: Real>(a: &Superoperator<T>, tol: T) -> Result<Superoperator<T>> {
    require_operation(a, tol, "a")?;
    Ok(a.invol_ud())
}
