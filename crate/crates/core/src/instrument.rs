//! Finite-outcome instruments: families of operations whose sum is trivial.

use indexmap::IndexMap;

use crate::bayes::{self, require_operation, Probability};
use crate::error::{Error, Result};
use crate::matcore::Matrix;
use crate::scalar::Real;
use crate::superop::Superoperator;

/// Outcome labels with one operation each, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument<T> {
    dim: usize,
    outcomes: Vec<String>,
    ops: Vec<Superoperator<T>>,
}

/// A set of outcomes of one instrument, held as sorted outcome indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeEvent {
    indices: Vec<usize>,
}

impl OutcomeEvent {
    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        OutcomeEvent { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_indices(self.indices.iter().chain(&other.indices).copied().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_indices(
            self.indices
                .iter()
                .copied()
                .filter(|&i| other.contains(i))
                .collect(),
        )
    }

    /// `self x other` inside a product instrument whose second factor has
    /// `second_len` outcomes.
    pub fn product(&self, other: &Self, second_len: usize) -> Self {
        Self::from_indices(
            self.indices
                .iter()
                .flat_map(|&i| other.indices.iter().map(move |&j| i * second_len + j))
                .collect(),
        )
    }
}

/// Defects `(|a(I) - I|, |a^(I) - I|)` in operator norm.
pub fn triviality_defects<T: Real>(a: &Superoperator<T>) -> Result<(T, T)> {
    let id = Matrix::identity(a.dim());
    Ok((
        (&a.apply(&id)? - &id).op_norm()?,
        (&a.invol_ud().apply(&id)? - &id).op_norm()?,
    ))
}

/// Validates a labelled family of operations as an instrument.
///
/// Each component must be an operation at `tol`; the sum must map `I` to
/// `I` in both directions within the scalar's instrument tolerance
/// (`1e-8` for `f64`).
pub fn make_instrument<T: Real>(
    ops: IndexMap<String, Superoperator<T>>,
    tol: T,
) -> Result<Instrument<T>> {
    Instrument::new(ops.into_iter().collect(), tol)
}

impl<T: Real> Instrument<T> {
    pub fn new(ops: Vec<(String, Superoperator<T>)>, tol: T) -> Result<Self> {
        let dim = ops.first().ok_or(Error::EmptyInstrument)?.1.dim();
        let mut outcomes = Vec::with_capacity(ops.len());
        let mut parts = Vec::with_capacity(ops.len());
        for (label, op) in ops {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
            if outcomes.contains(&label) {
                return Err(Error::DuplicateOutcome(label));
            }
            require_operation(&op, tol, &format!("outcome {label:?}"))?;
            outcomes.push(label);
            parts.push(op);
        }
        let inst = Instrument {
            dim,
            outcomes,
            ops: parts,
        };
        let (unital_defect, tracial_defect) = triviality_defects(&inst.total())?;
        let limit = T::instrument_tol();
        if !(unital_defect <= limit && tracial_defect <= limit) {
            return Err(Error::NotTrivialSum {
                unital_defect: unital_defect.to_f64_lossy(),
                tracial_defect: tracial_defect.to_f64_lossy(),
            });
        }
        Ok(inst)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Superoperator<T>] {
        &self.ops
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o == label)
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    pub fn get(&self, label: &str) -> Result<&Superoperator<T>> {
        Ok(&self.ops[self.index_of(label)?])
    }

    pub fn event<S: AsRef<str>>(&self, labels: &[S]) -> Result<OutcomeEvent> {
        let indices = labels
            .iter()
            .map(|l| self.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(OutcomeEvent::from_indices(indices))
    }

    /// The whole outcome set.
    pub fn all(&self) -> OutcomeEvent {
        OutcomeEvent::from_indices((0..self.len()).collect())
    }

    fn check_event(&self, event: &OutcomeEvent) -> Result<()> {
        match event.indices.last() {
            Some(&i) if i >= self.len() => Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            }),
            _ => Ok(()),
        }
    }

    /// `sum_{alpha in event} I(alpha)`; the zero map for an empty event.
    pub fn sum_over(&self, event: &OutcomeEvent) -> Result<Superoperator<T>> {
        self.check_event(event)?;
        if event.is_empty() {
            return Ok(Superoperator::zero(self.dim));
        }
        Superoperator::sum(event.indices.iter().map(|&i| &self.ops[i]))
    }

    pub fn total(&self) -> Superoperator<T> {
        self.sum_over(&self.all()).expect("full event is in range")
    }

    /// `(IJ)(xi, zeta) = I(xi) J(zeta)`: `J` acts first. Labels are `"xi,zeta"`.
    pub fn product(&self, other: &Self, tol: T) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut ops = Vec::with_capacity(self.len() * other.len());
        for (xi, a) in self.outcomes.iter().zip(&self.ops) {
            for (zeta, b) in other.outcomes.iter().zip(&other.ops) {
                ops.push((format!("{xi},{zeta}"), a.compose(b)?));
            }
        }
        Self::new(ops, tol)
    }

    /// The instrument with every component replaced by its time reversal.
    pub fn reversed(&self, tol: T) -> Result<Self> {
        Self::new(
            self.outcomes
                .iter()
                .cloned()
                .zip(self.ops.iter().map(Superoperator::invol_ud))
                .collect(),
            tol,
        )
    }
}

/// `P<-_I(A|a) = P<-(sum_{alpha in A} I(alpha) | a)`.
pub fn p_inst_pred<T: Real>(
    inst: &Instrument<T>,
    event: &OutcomeEvent,
    a: &Superoperator<T>,
    tol: T,
) -> Result<Probability<T>> {
    bayes::p_pred(&inst.sum_over(event)?, a, tol)
}

/// `P->_I(A|a) = P->(sum_{alpha in A} I(alpha) | a)`.
pub fn p_inst_retro<T: Real>(
    inst: &Instrument<T>,
    event: &OutcomeEvent,
    a: &Superoperator<T>,
    tol: T,
) -> Result<Probability<T>> {
    bayes::p_retro(&inst.sum_over(event)?, a, tol)
}

/// `P_I(A) = P(sum_{alpha in A} I(alpha))`.
pub fn p_inst<T: Real>(
    inst: &Instrument<T>,
    event: &OutcomeEvent,
    tol: T,
) -> Result<Probability<T>> {
    bayes::p_prior(&inst.sum_over(event)?, tol)
}

/// `sum_{(xi, zeta) in A x B} first(xi) second(zeta)`, term by term.
fn product_event_sum<T: Real>(
    first: &Instrument<T>,
    a: &OutcomeEvent,
    second: &Instrument<T>,
    b: &OutcomeEvent,
) -> Result<Superoperator<T>> {
    first.check_event(a)?;
    second.check_event(b)?;
    if first.dim != second.dim {
        return Err(Error::DimensionMismatch {
            expected: first.dim,
            found: second.dim,
        });
    }
    let mut acc = Superoperator::zero(first.dim);
    for &i in a.indices() {
        for &j in b.indices() {
            acc = acc.add(&first.ops[i].compose(&second.ops[j])?)?;
        }
    }
    Ok(acc)
}

fn conditional<T: Real>(
    joint: &Superoperator<T>,
    given: &Superoperator<T>,
    tol: T,
) -> Result<Probability<T>> {
    let denom = bayes::p_prior(given, tol)?.value();
    if denom <= tol {
        return Err(Error::ZeroCondition {
            weight: denom.to_f64_lossy(),
        });
    }
    let num = bayes::p_prior(joint, tol)?.value();
    Probability::from_value(num / denom, tol)
}

/// `P<-_{I,J}(A|B) = P_{IJ}(A x B) / P_J(B)`: `I` reads `A` right after `J` read `B`.
pub fn p_cond_pred<T: Real>(
    i: &Instrument<T>,
    j: &Instrument<T>,
    a: &OutcomeEvent,
    b: &OutcomeEvent,
    tol: T,
) -> Result<Probability<T>> {
    let joint = product_event_sum(i, a, j, b)?;
    conditional(&joint, &j.sum_over(b)?, tol)
}

/// `P->_{I,J}(A|B) = P_{JI}(B x A) / P_J(B)`: `I` read `A` right before `J` reads `B`.
pub fn p_cond_retro<T: Real>(
    i: &Instrument<T>,
    j: &Instrument<T>,
    a: &OutcomeEvent,
    b: &OutcomeEvent,
    tol: T,
) -> Result<Probability<T>> {
    let joint = product_event_sum(j, b, i, a)?;
    conditional(&joint, &j.sum_over(b)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = Superoperator<f64>;
    type M = Matrix<f64>;
    const TOL: f64 = 1e-9;

    fn lueders(rows_plus: &[&[f64]], rows_minus: &[&[f64]]) -> Instrument<f64> {
        let mut ops = IndexMap::new();
        ops.insert(
            "+".to_string(),
            S::projecting(&M::from_real_rows(rows_plus).unwrap(), TOL).unwrap(),
        );
        ops.insert(
            "-".to_string(),
            S::projecting(&M::from_real_rows(rows_minus).unwrap(), TOL).unwrap(),
        );
        make_instrument(ops, TOL).unwrap()
    }

    fn z() -> Instrument<f64> {
        lueders(&[&[1.0, 0.0], &[0.0, 0.0]], &[&[0.0, 0.0], &[0.0, 1.0]])
    }

    fn x() -> Instrument<f64> {
        lueders(&[&[0.5, 0.5], &[0.5, 0.5]], &[&[0.5, -0.5], &[-0.5, 0.5]])
    }

    fn unit_instrument(label: &str) -> Instrument<f64> {
        Instrument::new(vec![(label.to_string(), S::unit(2))], TOL).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(z().len(), 2);
        let h = 0.5f64.sqrt();
        let u = S::unitary(&M::from_real_rows(&[&[h, h], &[h, -h]]).unwrap(), TOL).unwrap();
        assert!(Instrument::new(vec![("u".into(), u)], TOL).is_ok());
        let lone = vec![("+".to_string(), z().get("+").unwrap().clone())];
        assert!(matches!(
            Instrument::new(lone, TOL),
            Err(Error::NotTrivialSum { .. })
        ));
        assert!(matches!(
            Instrument::<f64>::new(vec![], TOL),
            Err(Error::EmptyInstrument)
        ));
        let not_op = vec![("big".to_string(), S::unit(2).scale(2.0).unwrap())];
        assert!(matches!(
            Instrument::new(not_op, TOL),
            Err(Error::NotOperation(_))
        ));
        let dup = vec![
            ("u".to_string(), S::unit(2).scale(0.5).unwrap()),
            ("u".to_string(), S::unit(2).scale(0.5).unwrap()),
        ];
        assert!(matches!(
            Instrument::new(dup, TOL),
            Err(Error::DuplicateOutcome(_))
        ));
    }

    #[test]
    fn products() {
        let zu = z().product(&unit_instrument("u"), TOL).unwrap();
        assert_eq!(zu.outcomes(), ["+,u", "-,u"]);
        for (a, b) in zu.ops().iter().zip(z().ops()) {
            assert_eq!(a, b);
        }
        let zx = z().product(&x(), TOL).unwrap();
        assert_eq!(zx.len(), 4);
        let (du, dt) = triviality_defects(&zx.total()).unwrap();
        assert!(du < 1e-10 && dt < 1e-10);
        let uu = unit_instrument("a")
            .product(&unit_instrument("b"), TOL)
            .unwrap();
        assert_eq!(uu.outcomes(), ["a,b"]);
        assert_eq!(uu.ops()[0], S::unit(2));
    }

    #[test]
    fn outcome_probabilities() {
        let z = z();
        assert!((p_inst(&z, &z.event(&["+"]).unwrap(), TOL).unwrap().value() - 0.5).abs() < 1e-15);
        assert!((p_inst(&z, &z.all(), TOL).unwrap().value() - 1.0).abs() < 1e-15);
        let x = x();
        let pz = z.get("+").unwrap();
        let lhs = p_inst_pred(&x, &x.event(&["+"]).unwrap(), pz, TOL)
            .unwrap()
            .value();
        assert!((lhs - 0.5).abs() < 1e-15);
        assert_eq!(
            p_inst(&z, &OutcomeEvent::from_indices(vec![]), TOL)
                .unwrap()
                .value(),
            0.0
        );
        assert!(matches!(z.event(&["?"]), Err(Error::UnknownOutcome(_))));
    }

    #[test]
    fn conditional_probabilities() {
        let z = z();
        let x = x();
        let plus = z.event(&["+"]).unwrap();
        assert!((p_cond_pred(&z, &z, &plus, &plus, TOL).unwrap().value() - 1.0).abs() < 1e-15);
        let xp = x.event(&["+"]).unwrap();
        assert!((p_cond_pred(&x, &z, &xp, &plus, TOL).unwrap().value() - 0.5).abs() < 1e-15);
        assert!((p_cond_pred(&x, &z, &x.all(), &plus, TOL).unwrap().value() - 1.0).abs() < 1e-15);
        assert!((p_cond_retro(&x, &z, &x.all(), &plus, TOL).unwrap().value() - 1.0).abs() < 1e-15);
        let none = OutcomeEvent::from_indices(vec![]);
        assert!(matches!(
            p_cond_pred(&x, &z, &xp, &none, TOL),
            Err(Error::ZeroCondition { .. })
        ));
    }

    #[test]
    fn event_algebra() {
        let a = OutcomeEvent::from_indices(vec![2, 0, 2]);
        assert_eq!(a.indices(), [0, 2]);
        let b = OutcomeEvent::from_indices(vec![1, 2]);
        assert_eq!(a.union(&b).indices(), [0, 1, 2]);
        assert_eq!(a.intersection(&b).indices(), [2]);
        assert_eq!(a.product(&b, 3).indices(), [1, 2, 7, 8]);
    }
}
