//! Time-symmetric quantum probability over finite-dimensional operations.
//!
//! The crate covers the algebra of linear maps on `nu x nu` complex
//! matrices (involutions, traces, positivity, Kraus forms), the
//! predictive/retrodictive Bayesian probabilities built on it, finite
//! instruments, Bayesian states, and a Monte Carlo sampler used to check
//! retrodiction empirically.
//!
//! Everything is generic over the real scalar [`Real`] (`f32` or `f64`);
//! the `*64` aliases below fix it to `f64`.

pub mod bayes;
pub mod error;
pub mod instrument;
pub mod matcore;
pub mod random;
pub mod scalar;
pub mod sim;
pub mod states;
pub mod superop;

pub use bayes::{
    bayes_predict, bayes_retrodict, p_pred, p_prior, p_retro, time_reverse, Probability,
};
pub use error::{Error, Result};
pub use instrument::{
    make_instrument, p_cond_pred, p_cond_retro, p_inst, p_inst_pred, p_inst_retro,
    triviality_defects, Instrument, OutcomeEvent,
};
pub use matcore::{hermitian_eig, is_psd, loewner_leq, EigSystem, Matrix};
pub use scalar::{Real, C};
pub use sim::{FreqReport, Query, SimConfig, Simulator, StepOutcome, Trajectory};
pub use states::{
    effects_of, state, state_of_instrument, state_posterior, state_prior, DensityMatrix, Direction,
    Effect,
};
pub use superop::{KrausSet, OperationClass, Superoperator};

pub type Complex64 = C<f64>;
pub type Matrix64 = Matrix<f64>;
pub type EigSystem64 = EigSystem<f64>;
pub type Superoperator64 = Superoperator<f64>;
pub type KrausSet64 = KrausSet<f64>;
pub type Instrument64 = Instrument<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type Effect64 = Effect<f64>;
pub type Probability64 = Probability<f64>;
pub type Simulator64 = Simulator<f64>;

pub type Matrix32 = Matrix<f32>;
pub type Superoperator32 = Superoperator<f32>;
