//! Closed-form limits and the two-firm pure Nash check.

use serde::Serialize;

use super::choice_set::ChoiceSet;
use super::three_firm::fixed_point_three;
use super::EliminationError;
use crate::market::ModelParams;
use crate::reaction::{reaction_firm1_two, reaction_firm2_two, ResponseSet};

/// Largest reaction gap still counted as an intersection.
pub const NASH_TOL: f64 = 1e-12;

fn two_firms(params: &ModelParams) -> Result<(), EliminationError> {
    if params.n() == 2 {
        Ok(())
    } else {
        Err(EliminationError::WrongFirmCount {
            expected: 2,
            got: params.n(),
        })
    }
}

/// `{(a_i + 1)/(a_1 + a_2 + 2)}`, which is `{1/2}` when the firms are alike.
pub fn closed_form_limit_two(params: &ModelParams) -> Result<ChoiceSet, EliminationError> {
    two_firms(params)?;
    let (a1, a2) = (params.a(0), params.a(1));
    let s = a1 + a2 + 2.0;
    let pts = if a1 == a2 {
        vec![0.5]
    } else {
        vec![(a1.min(a2) + 1.0) / s, (a1.max(a2) + 1.0) / s]
    };
    ChoiceSet::points(&pts).map_err(|e| EliminationError::BadState(e.to_string()))
}

/// `[(1 + a)/(4 + 3a), (3 + 2a)/(4 + 3a)]`.
pub fn closed_form_limit_three(a: f64) -> Result<ChoiceSet, EliminationError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(EliminationError::BadInefficiency(a));
    }
    let u = fixed_point_three(a);
    ChoiceSet::interval((1.0 + a) / (4.0 + 3.0 * a), u)
        .map_err(|e| EliminationError::BadState(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashReport {
    /// `(c_1, c_2)` in the caller's firm order, when the reaction curves meet.
    pub equilibrium: Option<[f64; 2]>,
    /// Smallest `|r_1(c_2) - c_1|` over scanned `c_1` and `c_2 in R_2(c_1)`.
    pub min_gap: f64,
    /// Profile attaining `min_gap`, caller's order.
    pub argmin: [f64; 2],
    pub scanned: usize,
}

/// Scans `scan_n` evenly spaced `c_1` (plus the centre) for a fixed point of
/// the two reaction correspondences.
pub fn pure_nash_two(params: &ModelParams, scan_n: usize) -> Result<NashReport, EliminationError> {
    two_firms(params)?;
    if scan_n < 2 {
        return Err(EliminationError::BadScan(scan_n));
    }
    let (a1, a2) = (params.a(0), params.a(1));
    let flipped = a1 > a2;
    let work = if flipped {
        params.reversed()
    } else {
        params.clone()
    };
    let relabel = |c1: f64, c2: f64| if flipped { [c2, c1] } else { [c1, c2] };

    if a1 == a2 {
        let a = a1;
        let r = |c: f64| (c + a) / (1.0 + 2.0 * a);
        let (min_gap, argmin) = grid(scan_n)
            .map(|c1| ((r(r(c1)) - c1).abs(), [c1, r(c1)]))
            .fold((f64::INFINITY, [0.0; 2]), |best, x| {
                if x.0 < best.0 {
                    x
                } else {
                    best
                }
            });
        return Ok(NashReport {
            equilibrium: Some([0.5, 0.5]),
            min_gap,
            argmin,
            scanned: scan_n + 1,
        });
    }

    let mut best = (f64::INFINITY, [0.0; 2]);
    for c1 in grid(scan_n) {
        let responses = match reaction_firm2_two(c1, &work).map_err(reaction_err)? {
            ResponseSet::Points { points } => points,
            ResponseSet::Interval { lo, hi } => vec![lo, hi],
        };
        for c2 in responses {
            let back = reaction_firm1_two(c2, &work).map_err(reaction_err)?.min();
            let gap = (back - c1).abs();
            if gap < best.0 {
                best = (gap, [c1, c2]);
            }
        }
    }
    let (min_gap, [c1, c2]) = best;
    Ok(NashReport {
        equilibrium: (min_gap <= NASH_TOL).then(|| relabel(c1, c2)),
        min_gap,
        argmin: relabel(c1, c2),
        scanned: scan_n + 1,
    })
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n)
        .map(move |j| j as f64 / (n - 1) as f64)
        .chain(std::iter::once(0.5))
}

fn reaction_err(e: crate::reaction::ReactionError) -> EliminationError {
    EliminationError::BadState(e.to_string())
}
