//! Three symmetric firms: every round set is `[1 - U^k, U^k]` and the upper
//! endpoint follows the affine recurrence
//! `U^k = (3 + 2a)(a + U^{k-1}) / (3 (1 + a)^2)`, starting from `U^0 = 1`.

use serde::Serialize;

use super::choice_set::{ChoiceSet, MERGE_TOL};
use super::trace::EliminationTrace;
use super::EliminationError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeFirmRoundState {
    pub round: usize,
    pub u: f64,
    pub set: ChoiceSet,
}

impl ThreeFirmRoundState {
    pub fn initial() -> Self {
        ThreeFirmRoundState {
            round: 0,
            u: 1.0,
            set: ChoiceSet::full(),
        }
    }

    pub fn new(round: usize, u: f64) -> Result<Self, EliminationError> {
        if !(u > 0.5 && u <= 1.0) {
            return Err(EliminationError::BadState(format!(
                "U = {u} outside (1/2, 1]"
            )));
        }
        let set = ChoiceSet::interval(1.0 - u, u)
            .map_err(|e| EliminationError::BadState(e.to_string()))?;
        Ok(ThreeFirmRoundState { round, u, set })
    }
}

/// `(3 + 2a) / (4 + 3a)`.
pub fn fixed_point_three(a: f64) -> f64 {
    (3.0 + 2.0 * a) / (4.0 + 3.0 * a)
}

/// `(3 + 2a) / (3 (1 + a)^2)`, the contraction factor of the recurrence.
pub fn slope_three(a: f64) -> f64 {
    (3.0 + 2.0 * a) / (3.0 * (1.0 + a) * (1.0 + a))
}

fn check_a(a: f64) -> Result<(), EliminationError> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(EliminationError::BadInefficiency(a))
    }
}

pub fn round_three_symmetric(
    state: &ThreeFirmRoundState,
    a: f64,
) -> Result<ThreeFirmRoundState, EliminationError> {
    check_a(a)?;
    let fixed = fixed_point_three(a);
    // The fixed point itself is accepted so converged runs can keep stepping.
    if state.u < fixed - MERGE_TOL || state.u > 1.0 {
        return Err(EliminationError::BadState(format!(
            "U = {} is below the fixed point {fixed}",
            state.u
        )));
    }
    let u = (3.0 + 2.0 * a) * (a + state.u) / (3.0 * (1.0 + a) * (1.0 + a));
    if u > state.u + MERGE_TOL {
        return Err(EliminationError::BadState(format!(
            "U increased from {} to {u}",
            state.u
        )));
    }
    ThreeFirmRoundState::new(state.round + 1, u.min(state.u))
}

/// Iterates until the predicted distance to the fixed point,
/// `gap * s / (1 - s)`, is at most `tol`.
pub fn iterate_three_symmetric(
    a: f64,
    tol: f64,
    max_rounds: usize,
) -> Result<EliminationTrace, EliminationError> {
    check_a(a)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(EliminationError::BadTolerance(tol));
    }
    if max_rounds == 0 {
        return Err(EliminationError::BadRoundCap);
    }
    let s = slope_three(a);
    let mut state = ThreeFirmRoundState::initial();
    let mut trace = EliminationTrace::start(vec![a; 3]);
    for _ in 0..max_rounds {
        let next = round_three_symmetric(&state, a)?;
        let gap = trace.push(vec![next.set.clone(); 3]);
        state = next;
        if gap * s / (1.0 - s) <= tol {
            trace.converged_at = Some(trace.n_rounds());
            break;
        }
    }
    trace.finish(tol);
    if trace.converged() {
        Ok(trace)
    } else {
        Err(EliminationError::NonConverged(Box::new(trace)))
    }
}
