//! Iterated elimination of never-best locations.
//!
//! Round `k` keeps the locations that are a best response to some belief
//! supported on the opponents' round `k - 1` sets. The engines here follow
//! the closed-form round updates; [`crate::oracle`] recomputes the same
//! rounds by brute force.

pub mod choice_set;
pub mod nash;
pub mod three_firm;
pub mod trace;
pub mod two_firm;

use thiserror::Error;

pub use choice_set::{ChoiceSet, Interval, SetError, MERGE_TOL};
pub use nash::{closed_form_limit_three, closed_form_limit_two, pure_nash_two, NashReport};
pub use three_firm::{iterate_three_symmetric, round_three_symmetric, ThreeFirmRoundState};
pub use trace::EliminationTrace;
pub use two_firm::{iterate_symmetric_two, iterate_two_firm, round_two_firm, TwoFirmRoundState};

use crate::market::ModelParams;

/// Stopping distance between successive rounds.
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EliminationError {
    #[error("expected {expected} firms, got {got}")]
    WrongFirmCount { expected: usize, got: usize },
    #[error("this engine needs a_1 < a_2, got a_1 = {a1}, a_2 = {a2}")]
    NotAsymmetric { a1: f64, a2: f64 },
    #[error("inefficiency must be positive and finite, got {0}")]
    BadInefficiency(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("max_rounds must be at least 1")]
    BadRoundCap,
    #[error("scan needs at least 2 points, got {0}")]
    BadScan(usize),
    #[error("three firms are supported only with equal inefficiencies")]
    UnsupportedModel,
    #[error("invalid round state: {0}")]
    BadState(String),
    #[error("no convergence after {} rounds (last gap {:e})", .0.n_rounds(), .0.hausdorff_gaps.last().copied().unwrap_or(f64::NAN))]
    NonConverged(Box<EliminationTrace>),
}

/// Picks the engine that fits `params`: asymmetric or symmetric two firms,
/// or three symmetric firms.
pub fn rationalize(
    params: &ModelParams,
    tol: f64,
    max_rounds: usize,
) -> Result<EliminationTrace, EliminationError> {
    match params.n() {
        2 if params.a(0) == params.a(1) => iterate_symmetric_two(params.a(0), tol, max_rounds),
        2 => iterate_two_firm(params, tol, max_rounds),
        3 if params.is_symmetric() => iterate_three_symmetric(params.a(0), tol, max_rounds),
        3 => Err(EliminationError::UnsupportedModel),
        n => Err(EliminationError::WrongFirmCount {
            expected: 3,
            got: n,
        }),
    }
}

/// Closed-form limit matching [`rationalize`].
pub fn closed_form_limit(params: &ModelParams) -> Result<ChoiceSet, EliminationError> {
    match params.n() {
        2 => closed_form_limit_two(params),
        3 if params.is_symmetric() => closed_form_limit_three(params.a(0)),
        3 => Err(EliminationError::UnsupportedModel),
        n => Err(EliminationError::WrongFirmCount {
            expected: 3,
            got: n,
        }),
    }
}
