//! Seeded Monte Carlo sampling of instrument sequences.
//!
//! Each trajectory starts from the prior state and passes through the
//! instruments in order. At a step with state `rho`, outcome `xi` occurs with
//! probability `tr I(xi)(rho)` and the state becomes `I(xi)(rho) / prob`.
//!
//! Randomness comes from ChaCha8 keyed by the 64-bit seed, with one stream
//! per trajectory index. Trajectory `k` is therefore the same no matter
//! which thread draws it, and the integer counts aggregate identically
//! for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instrument::{Instrument, OutcomeEvent};
use crate::matcore::Matrix;
use crate::scalar::Real;
use crate::states::DensityMatrix;
use crate::superop::KrausSet;

/// Tolerance on `sum_xi prob(xi) = 1` at every step.
pub const BRANCH_SUM_TOL: f64 = 1e-10;
/// A sampled branch with less probability than this indicates a sampler bug.
pub const MIN_BRANCH_PROB: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub index: u64,
    /// `(instrument name, outcome label)` per step.
    pub steps: Vec<(String, String)>,
}

/// One outcome at one step of the sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub step: usize,
    pub outcome: String,
}

impl StepOutcome {
    pub fn new(step: usize, outcome: impl Into<String>) -> Self {
        StepOutcome {
            step,
            outcome: outcome.into(),
        }
    }
}

/// Frequency of `target` among trajectories that hit `condition`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub condition: StepOutcome,
    pub target: StepOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqReport {
    pub condition: StepOutcome,
    pub target: StepOutcome,
    /// `"predictive"` when the target comes after the condition,
    /// `"retrodictive"` when before, `"simultaneous"` otherwise.
    pub kind: String,
    pub trials: u64,
    pub condition_hits: u64,
    pub joint_hits: u64,
    pub empirical: f64,
    pub exact: f64,
    pub abs_err: f64,
    /// `sqrt(p (1 - p) / condition_hits)` with `p` the exact value.
    pub std_err: f64,
}

impl FreqReport {
    /// `|empirical - exact| <= k * std_err`.
    pub fn within_sigma(&self, k: f64) -> bool {
        self.abs_err <= k * self.std_err
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// `Some(1)` runs on the calling thread; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        SimConfig {
            trials,
            seed,
            threads: None,
        }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

struct Stage<T> {
    name: String,
    outcomes: Vec<String>,
    kraus: Vec<KrausSet<T>>,
    // sum_k M_k* M_k per outcome, so prob = tr(rho E).
    effects: Vec<Matrix<T>>,
}

/// A fixed sequence of instruments and a prior, ready to sample.
pub struct Simulator<T> {
    dim: usize,
    prior: DensityMatrix<T>,
    stages: Vec<Stage<T>>,
    instruments: Vec<Instrument<T>>,
}

impl<T: Real> Simulator<T> {
    /// Converts every component to Kraus form. `prior` defaults to `I / nu`.
    pub fn new(
        sequence: Vec<(String, Instrument<T>)>,
        prior: Option<DensityMatrix<T>>,
        tol: T,
    ) -> Result<Self> {
        let dim = sequence
            .first()
            .map(|(_, inst)| inst.dim())
            .ok_or_else(|| Error::InvalidRequest("empty instrument sequence".into()))?;
        let prior = prior.unwrap_or_else(|| DensityMatrix::maximally_mixed(dim));
        if prior.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: prior.dim(),
            });
        }
        let mut stages = Vec::with_capacity(sequence.len());
        let mut instruments = Vec::with_capacity(sequence.len());
        for (name, inst) in sequence {
            if inst.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: inst.dim(),
                });
            }
            let kraus = inst
                .ops()
                .iter()
                .map(|op| op.extract_kraus(tol))
                .collect::<Result<Vec<_>>>()?;
            let effects = kraus.iter().map(KrausSet::sum_madj_m).collect();
            stages.push(Stage {
                name,
                outcomes: inst.outcomes().to_vec(),
                kraus,
                effects,
            });
            instruments.push(inst);
        }
        Ok(Simulator {
            dim,
            prior,
            stages,
            instruments,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> usize {
        self.stages.len()
    }

    fn rng(seed: u64, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        rng
    }

    /// Outcome indices of trajectory `index` under `seed`.
    fn sample_indices(&self, seed: u64, index: u64) -> Result<Vec<usize>> {
        let mut rng = Self::rng(seed, index);
        let mut rho = self.prior.matrix().clone();
        let mut picks = Vec::with_capacity(self.stages.len());
        let sum_tol = T::from_f64_lossy(BRANCH_SUM_TOL);
        for stage in &self.stages {
            let probs: Vec<T> = stage
                .effects
                .iter()
                .map(|e| (&rho * e).trace().re)
                .collect();
            let total = probs.iter().fold(T::zero(), |acc, &p| acc + p);
            if (total - T::one()).abs() > sum_tol {
                return Err(Error::InvariantViolation(format!(
                    "branch probabilities of {} sum to {total}",
                    stage.name
                )));
            }
            let u = T::from_f64_lossy(rng.random::<f64>());
            let mut acc = T::zero();
            let mut pick = None;
            for (k, &p) in probs.iter().enumerate() {
                acc = acc + p;
                if u < acc {
                    pick = Some(k);
                    break;
                }
            }
            // u landed in the rounding gap above the cumulative total.
            let pick = pick.unwrap_or_else(|| {
                probs
                    .iter()
                    .rposition(|&p| p > T::zero())
                    .unwrap_or(probs.len() - 1)
            });
            let p = probs[pick];
            if p < T::from_f64_lossy(MIN_BRANCH_PROB) {
                return Err(Error::ZeroProbabilityBranch {
                    label: stage.outcomes[pick].clone(),
                    probability: p.to_f64_lossy(),
                });
            }
            rho = stage.kraus[pick].apply(&rho)?.scale_real(T::one() / p);
            picks.push(pick);
        }
        Ok(picks)
    }

    /// Trajectory number `index` for `seed`.
    pub fn sample_trajectory(&self, seed: u64, index: u64) -> Result<Trajectory> {
        let picks = self.sample_indices(seed, index)?;
        Ok(Trajectory {
            seed,
            index,
            steps: self
                .stages
                .iter()
                .zip(picks)
                .map(|(s, k)| (s.name.clone(), s.outcomes[k].clone()))
                .collect(),
        })
    }

    /// The first trajectory for `seed`.
    pub fn sample_sequence(&self, seed: u64) -> Result<Trajectory> {
        self.sample_trajectory(seed, 0)
    }

    fn resolve(&self, at: &StepOutcome) -> Result<usize> {
        let stage = self.stages.get(at.step).ok_or(Error::IndexOutOfRange {
            index: at.step,
            len: self.stages.len(),
        })?;
        stage
            .outcomes
            .iter()
            .position(|o| *o == at.outcome)
            .ok_or_else(|| Error::UnknownOutcome(at.outcome.clone()))
    }

    /// `tr[c(rho)]` where `c` runs steps `0..=last` with the given steps
    /// restricted to single outcomes and all other steps summed.
    fn chain_weight(&self, fixed: &[(usize, usize)]) -> Result<T> {
        let last = fixed.iter().map(|&(s, _)| s).max().unwrap_or(0);
        let mut rho = self.prior.matrix().clone();
        for step in 0..=last {
            let inst = &self.instruments[step];
            let mut event = inst.all();
            for &(s, k) in fixed {
                if s == step {
                    event = event.intersection(&OutcomeEvent::from_indices(vec![k]));
                }
            }
            rho = inst.sum_over(&event)?.apply(&rho)?;
        }
        Ok(rho.trace().re)
    }

    /// Exact conditional probability for a query under this prior.
    pub fn exact(&self, query: &Query) -> Result<T> {
        let c = (query.condition.step, self.resolve(&query.condition)?);
        let t = (query.target.step, self.resolve(&query.target)?);
        let cond = self.chain_weight(&[c])?;
        if cond <= T::zero() {
            return Err(Error::ZeroCondition {
                weight: cond.to_f64_lossy(),
            });
        }
        Ok(self.chain_weight(&[c, t])? / cond)
    }

    /// Runs `config.trials` trajectories once and reports every query.
    pub fn estimate_many(&self, queries: &[Query], config: SimConfig) -> Result<Vec<FreqReport>> {
        if config.trials == 0 {
            return Err(Error::InvalidRequest("trials must be at least 1".into()));
        }
        let resolved = queries
            .iter()
            .map(|q| {
                Ok((
                    (q.condition.step, self.resolve(&q.condition)?),
                    (q.target.step, self.resolve(&q.target)?),
                ))
            })
            .collect::<Result<Vec<_>>>()?;

        let count_one = |index: u64| -> Result<Vec<(u64, u64)>> {
            let picks = self.sample_indices(config.seed, index)?;
            Ok(resolved
                .iter()
                .map(|&((cs, ck), (ts, tk))| {
                    let hit = picks[cs] == ck;
                    (u64::from(hit), u64::from(hit && picks[ts] == tk))
                })
                .collect())
        };
        let merge = |mut a: Vec<(u64, u64)>, b: Vec<(u64, u64)>| {
            for (x, y) in a.iter_mut().zip(b) {
                x.0 += y.0;
                x.1 += y.1;
            }
            a
        };
        let zero = vec![(0u64, 0u64); resolved.len()];

        let counts = match config.threads {
            Some(1) => (0..config.trials).try_fold(zero, |acc, i| Ok(merge(acc, count_one(i)?)))?,
            threads => {
                let run = || {
                    (0..config.trials)
                        .into_par_iter()
                        .map(count_one)
                        .try_reduce(|| zero.clone(), |a, b| Ok(merge(a, b)))
                };
                match threads {
                    Some(n) => rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build()
                        .map_err(|e| Error::InvalidRequest(e.to_string()))?
                        .install(run)?,
                    None => run()?,
                }
            }
        };

        queries
            .iter()
            .zip(counts)
            .map(|(q, (hits, joint))| {
                if hits == 0 {
                    return Err(Error::NoConditionHits {
                        step: q.condition.step,
                        outcome: q.condition.outcome.clone(),
                        trials: config.trials,
                    });
                }
                let exact = self.exact(q)?.to_f64_lossy();
                let empirical = joint as f64 / hits as f64;
                let kind = match q.target.step.cmp(&q.condition.step) {
                    std::cmp::Ordering::Greater => "predictive",
                    std::cmp::Ordering::Less => "retrodictive",
                    std::cmp::Ordering::Equal => "simultaneous",
                };
                let p = exact.clamp(0.0, 1.0);
                Ok(FreqReport {
                    condition: q.condition.clone(),
                    target: q.target.clone(),
                    kind: kind.to_string(),
                    trials: config.trials,
                    condition_hits: hits,
                    joint_hits: joint,
                    empirical,
                    exact,
                    abs_err: (empirical - exact).abs(),
                    std_err: (p * (1.0 - p) / hits as f64).sqrt(),
                })
            })
            .collect()
    }

    pub fn estimate(
        &self,
        condition: StepOutcome,
        target: StepOutcome,
        config: SimConfig,
    ) -> Result<FreqReport> {
        let q = Query { condition, target };
        Ok(self
            .estimate_many(std::slice::from_ref(&q), config)?
            .remove(0))
    }
}
