//! Closed-form best responses.
//!
//! Two firms: firm 1 (the more efficient, `a_1 < a_2`) has a continuous
//! reaction function, firm 2 a correspondence that is two-valued only at
//! `c_1 = 1/2`. Equal inefficiencies give the single affine map
//! `c_j -> (c_j + a) / (1 + 2a)`.
//!
//! Three symmetric firms: the response of firm `i` to opponents at
//! `(c_l, c_r)` is tabulated on the reduced belief domain
//! `c_l <= c_r, c_l >= 1 - c_r` as seven branches over four regions.
//! Beliefs outside the domain are reduced by reflection with
//! [`normalize_belief`] and the answer reflected back.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::ModelParams;

/// Tolerance for accepting a belief on a branch boundary and for
/// deduplicating branch values.
pub const BRANCH_TOL: f64 = 1e-9;

/// Snap distance that makes the two-valued response at `c_1 = 1/2`
/// reachable in floating point.
pub const CENTER_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReactionError {
    #[error("expected {expected} firms, got {got}")]
    WrongFirmCount { expected: usize, got: usize },
    #[error("asymmetric two-firm responses need a_1 < a_2, got a_1 = {a1}, a_2 = {a2}")]
    NotAsymmetric { a1: f64, a2: f64 },
    #[error("inefficiency must be positive and finite, got {0}")]
    BadInefficiency(f64),
    #[error("location {0} lies outside [0, 1]")]
    LocationOutOfRange(f64),
    #[error("belief ({c_l}, {c_r}) is outside the reduced domain c_l <= c_r, c_l >= 1 - c_r")]
    OutsideReducedDomain { c_l: f64, c_r: f64 },
    #[error("belief ({c_l}, {c_r}) matched no response branch")]
    NoBranch { c_l: f64, c_r: f64 },
    #[error("branches disagree at belief ({c_l}, {c_r})")]
    InconsistentBranches { c_l: f64, c_r: f64 },
}

/// Set of optimal locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseSet {
    /// Finitely many optimal locations, sorted and nonempty.
    Points { points: Vec<f64> },
    /// Every location in `[lo, hi]` is optimal.
    Interval { lo: f64, hi: f64 },
}

impl ResponseSet {
    pub fn point(x: f64) -> Self {
        ResponseSet::Points { points: vec![x] }
    }

    pub fn min(&self) -> f64 {
        match self {
            ResponseSet::Points { points } => points[0],
            ResponseSet::Interval { lo, .. } => *lo,
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            ResponseSet::Points { points } => points[points.len() - 1],
            ResponseSet::Interval { hi, .. } => *hi,
        }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        match self {
            ResponseSet::Points { points } => points.iter().any(|p| (p - x).abs() <= tol),
            ResponseSet::Interval { lo, hi } => x >= lo - tol && x <= hi + tol,
        }
    }

    /// Reflection `x -> 1 - x`.
    pub fn mirrored(&self) -> Self {
        match self {
            ResponseSet::Points { points } => ResponseSet::Points {
                points: points.iter().rev().map(|p| 1.0 - p).collect(),
            },
            ResponseSet::Interval { lo, hi } => ResponseSet::Interval {
                lo: 1.0 - hi,
                hi: 1.0 - lo,
            },
        }
    }

    /// The points themselves, or `k >= 2` evenly spaced samples of the interval.
    pub fn samples(&self, k: usize) -> Vec<f64> {
        match self {
            ResponseSet::Points { points } => points.clone(),
            ResponseSet::Interval { lo, hi } => {
                let k = k.max(2);
                (0..k)
                    .map(|j| lo + (hi - lo) * j as f64 / (k - 1) as f64)
                    .collect()
            }
        }
    }

    /// Hausdorff distance to a finite set of points.
    pub fn hausdorff_to_points(&self, other: &[f64]) -> f64 {
        let dist_to_other = |x: f64| {
            other
                .iter()
                .map(|y| (x - y).abs())
                .fold(f64::INFINITY, f64::min)
        };
        let forward = self
            .samples(2)
            .into_iter()
            .map(dist_to_other)
            .fold(0.0, f64::max);
        let backward = other
            .iter()
            .map(|&y| match self {
                ResponseSet::Points { points } => points
                    .iter()
                    .map(|p| (p - y).abs())
                    .fold(f64::INFINITY, f64::min),
                ResponseSet::Interval { lo, hi } => (lo - y).max(y - hi).max(0.0),
            })
            .fold(0.0, f64::max);
        // For an interval, the forward direction also needs the largest gap
        // between consecutive points of `other` that falls inside it.
        let interior = match self {
            ResponseSet::Interval { lo, hi } => {
                let mut sorted: Vec<f64> = other.to_vec();
                sorted.sort_by(f64::total_cmp);
                sorted
                    .windows(2)
                    .map(|w| {
                        let mid = 0.5 * (w[0] + w[1]);
                        if mid >= *lo && mid <= *hi {
                            0.5 * (w[1] - w[0])
                        } else {
                            0.0
                        }
                    })
                    .fold(0.0, f64::max)
            }
            ResponseSet::Points { .. } => 0.0,
        };
        forward.max(backward).max(interior)
    }
}

fn check_location(x: f64) -> Result<(), ReactionError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(ReactionError::LocationOutOfRange(x))
    }
}

fn check_inefficiency(a: f64) -> Result<(), ReactionError> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(ReactionError::BadInefficiency(a))
    }
}

fn asymmetric_pair(params: &ModelParams) -> Result<(f64, f64, f64), ReactionError> {
    if params.n() != 2 {
        return Err(ReactionError::WrongFirmCount {
            expected: 2,
            got: params.n(),
        });
    }
    let (a1, a2) = (params.a(0), params.a(1));
    if a1 >= a2 {
        return Err(ReactionError::NotAsymmetric { a1, a2 });
    }
    Ok((a1, a2, 1.0 + a1 + a2))
}

/// Best response of the efficient firm 1 to firm 2 at `c2`.
pub fn reaction_firm1_two(c2: f64, params: &ModelParams) -> Result<ResponseSet, ReactionError> {
    let (a1, a2, gamma) = asymmetric_pair(params)?;
    check_location(c2)?;
    let x = if c2 < a1 / (a1 + a2) {
        (c2 + a1) / gamma
    } else if c2 <= a2 / (a1 + a2) {
        c2
    } else {
        (c2 + a2) / gamma
    };
    Ok(ResponseSet::point(x))
}

/// Best response of the inefficient firm 2 to firm 1 at `c1`.
pub fn reaction_firm2_two(c1: f64, params: &ModelParams) -> Result<ResponseSet, ReactionError> {
    let (a1, a2, gamma) = asymmetric_pair(params)?;
    check_location(c1)?;
    let set = if (c1 - 0.5).abs() <= CENTER_SNAP {
        ResponseSet::Points {
            points: vec![(0.5 + a1) / gamma, (0.5 + a2) / gamma],
        }
    } else if c1 < 0.5 {
        ResponseSet::point((c1 + a2) / gamma)
    } else {
        ResponseSet::point((c1 + a1) / gamma)
    };
    Ok(set)
}

/// Best response when both firms share the inefficiency `a`.
pub fn reaction_symmetric_two(cj: f64, a: f64) -> Result<ResponseSet, ReactionError> {
    check_inefficiency(a)?;
    check_location(cj)?;
    Ok(ResponseSet::point((cj + a) / (1.0 + 2.0 * a)))
}

/// Dispatches a two-firm best response for `firm` (0 or 1) against the
/// opponent at `other`, relabelling firms when `a_1 > a_2`.
pub fn reaction_two(
    firm: usize,
    other: f64,
    params: &ModelParams,
) -> Result<ResponseSet, ReactionError> {
    if params.n() != 2 {
        return Err(ReactionError::WrongFirmCount {
            expected: 2,
            got: params.n(),
        });
    }
    let (a_self, a_other) = match firm {
        0 => (params.a(0), params.a(1)),
        _ => (params.a(1), params.a(0)),
    };
    if a_self == a_other {
        return reaction_symmetric_two(other, a_self);
    }
    let (lo, hi) = (a_self.min(a_other), a_self.max(a_other));
    let oriented = ModelParams::two(lo, hi).map_err(|_| ReactionError::BadInefficiency(lo))?;
    if a_self < a_other {
        reaction_firm1_two(other, &oriented)
    } else {
        reaction_firm2_two(other, &oriented)
    }
}

/// Opponent locations `(c_l, c_r)` in the reduced domain
/// `c_l <= c_r`, `c_l >= 1 - c_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefRegion {
    pub c_l: f64,
    pub c_r: f64,
}

impl BeliefRegion {
    pub fn new(c_l: f64, c_r: f64) -> Result<Self, ReactionError> {
        check_location(c_l)?;
        check_location(c_r)?;
        let tol = CENTER_SNAP;
        if c_l > c_r + tol || c_l < 1.0 - c_r - tol {
            return Err(ReactionError::OutsideReducedDomain { c_l, c_r });
        }
        Ok(Self { c_l, c_r })
    }
}

/// Sorts the pair and reflects it into the reduced domain when needed.
/// The flag reports whether a reflection was applied.
pub fn normalize_belief(c_l: f64, c_r: f64) -> Result<(BeliefRegion, bool), ReactionError> {
    check_location(c_l)?;
    check_location(c_r)?;
    let (lo, hi) = if c_l <= c_r { (c_l, c_r) } else { (c_r, c_l) };
    if lo < 1.0 - hi - CENTER_SNAP {
        Ok((
            BeliefRegion {
                c_l: 1.0 - hi,
                c_r: 1.0 - lo,
            },
            true,
        ))
    } else {
        Ok((BeliefRegion { c_l: lo, c_r: hi }, false))
    }
}

/// Corner constants of the three-firm region partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionBoundaries {
    /// `c_r` where region 1 meets the diagonal: `(1+2a)/(1+3a)`.
    pub diagonal_split: f64,
    /// `c_r` where region 4 opens: `(3+2a)/(4+3a)`.
    pub plateau_start: f64,
    /// `c_r` where regions 2 and 3 meet the anti-diagonal: `(1+4a+2a^2)/(2+7a+3a^2)`.
    pub lower_split: f64,
    /// Lower `c_l` of region 1 at `c_r = 1`: `(1+3a+2a^2)/(1+3a+3a^2)`.
    pub region1_edge: f64,
    /// Upper `c_l` of region 4 at `c_r = 1`: `(1+a)/(3+3a) = 1/3`.
    pub plateau_edge: f64,
    /// `c_l` companion of `plateau_start`: `(1+a)/(4+3a)`.
    pub plateau_start_c_l: f64,
    /// `c_l` companion of `lower_split`: `(1+3a+a^2)/(2+7a+3a^2)`.
    pub lower_split_c_l: f64,
}

pub fn region_boundaries_three(a: f64) -> Result<RegionBoundaries, ReactionError> {
    check_inefficiency(a)?;
    let a2 = a * a;
    Ok(RegionBoundaries {
        diagonal_split: (1.0 + 2.0 * a) / (1.0 + 3.0 * a),
        plateau_start: (3.0 + 2.0 * a) / (4.0 + 3.0 * a),
        lower_split: (1.0 + 4.0 * a + 2.0 * a2) / (2.0 + 7.0 * a + 3.0 * a2),
        region1_edge: (1.0 + 3.0 * a + 2.0 * a2) / (1.0 + 3.0 * a + 3.0 * a2),
        plateau_edge: (1.0 + a) / (3.0 + 3.0 * a),
        plateau_start_c_l: (1.0 + a) / (4.0 + 3.0 * a),
        lower_split_c_l: (1.0 + 3.0 * a + a2) / (2.0 + 7.0 * a + 3.0 * a2),
    })
}

/// One branch of the three-firm correspondence.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchMatch {
    /// Branch number, 1 through 7.
    pub branch: u8,
    /// Region of the partition the branch belongs to, 1 through 4.
    pub region: u8,
    pub response: ResponseSet,
}

fn region_of_branch(branch: u8) -> u8 {
    match branch {
        1 => 1,
        2..=4 => 2,
        5 | 6 => 3,
        _ => 4,
    }
}

/// Every branch whose domain contains `belief` within `tol`.
pub fn matching_branches(belief: BeliefRegion, a: f64, tol: f64) -> Vec<BranchMatch> {
    let BeliefRegion { c_l, c_r } = belief;
    let a2 = a * a;
    let b = match region_boundaries_three(a) {
        Ok(b) => b,
        Err(_) => return Vec::new(),
    };
    let region1_lower = (2.0 * a * c_r + c_r + a + 2.0 * a2) / (1.0 + 3.0 * a + 3.0 * a2);
    let mid_split = (4.0 * a * c_r + 3.0 * a2 * c_r + c_r - a - 2.0 * a2) / (1.0 + 3.0 * a);
    let plateau_upper = (a + c_r) / (3.0 + 3.0 * a);
    let anti = 1.0 - c_r;

    let far = (a + c_l + c_r) / (2.0 + 3.0 * a);
    let middle = (3.0 * a * c_l + 2.0 * c_l + a * c_r + a2) / (2.0 + 6.0 * a + 3.0 * a2);
    let near = (a + 3.0 * c_l - c_r) / (2.0 + 3.0 * a);
    let plateau_lo = (2.0 * c_l + 2.0 * a * c_l + a * c_r + a2) / (2.0 + 5.0 * a + 3.0 * a2);
    let plateau_hi =
        (a * c_l + 2.0 * a * c_r + 2.0 * c_r + 2.0 * a + 2.0 * a2) / (2.0 + 5.0 * a + 3.0 * a2);

    let within = |x: f64, lo: f64, hi: f64| x >= lo - tol && x <= hi + tol;
    let table: [(u8, bool, ResponseSet); 7] = [
        (
            1,
            within(c_r, b.diagonal_split, 1.0) && within(c_l, region1_lower, c_r),
            ResponseSet::point(far),
        ),
        (
            2,
            within(c_r, b.lower_split, b.plateau_start) && within(c_l, anti, mid_split),
            ResponseSet::point(middle),
        ),
        (
            3,
            within(c_r, b.plateau_start, b.diagonal_split) && within(c_l, plateau_upper, mid_split),
            ResponseSet::point(middle),
        ),
        (
            4,
            within(c_r, b.diagonal_split, 1.0) && within(c_l, plateau_upper, region1_lower),
            ResponseSet::point(middle),
        ),
        (
            5,
            within(c_r, 0.5, b.lower_split) && within(c_l, anti, c_r),
            ResponseSet::point(near),
        ),
        (
            6,
            within(c_r, b.lower_split, b.diagonal_split) && within(c_l, mid_split, c_r),
            ResponseSet::point(near),
        ),
        (
            7,
            within(c_r, b.plateau_start, 1.0) && within(c_l, anti, plateau_upper),
            ResponseSet::Interval {
                lo: plateau_lo,
                hi: plateau_hi,
            },
        ),
    ];
    table
        .into_iter()
        .filter(|(_, hit, _)| *hit)
        .map(|(branch, _, response)| BranchMatch {
            branch,
            region: region_of_branch(branch),
            response,
        })
        .collect()
}

/// Optimal locations for firm `i` against a belief in the reduced domain.
/// On branch boundaries the union of the agreeing branches is returned.
pub fn reaction_three_symmetric(
    belief: BeliefRegion,
    a: f64,
) -> Result<ResponseSet, ReactionError> {
    check_inefficiency(a)?;
    let BeliefRegion { c_l, c_r } = BeliefRegion::new(belief.c_l, belief.c_r)?;
    let matches = matching_branches(belief, a, BRANCH_TOL);
    if matches.is_empty() {
        return Err(ReactionError::NoBranch { c_l, c_r });
    }
    let interval = matches.iter().find_map(|m| match m.response {
        ResponseSet::Interval { lo, hi } => Some((lo, hi)),
        ResponseSet::Points { .. } => None,
    });
    let mut points: Vec<f64> = matches
        .iter()
        .filter_map(|m| match m.response {
            ResponseSet::Points { ref points } => Some(points[0]),
            ResponseSet::Interval { .. } => None,
        })
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup_by(|x, y| (*x - *y).abs() <= BRANCH_TOL);
    match interval {
        Some((lo, hi)) => {
            if points
                .iter()
                .any(|&p| p < lo - BRANCH_TOL || p > hi + BRANCH_TOL)
            {
                return Err(ReactionError::InconsistentBranches { c_l, c_r });
            }
            Ok(ResponseSet::Interval { lo, hi })
        }
        None => {
            if points.len() > 1 {
                return Err(ReactionError::InconsistentBranches { c_l, c_r });
            }
            Ok(ResponseSet::Points { points })
        }
    }
}

/// Three-firm response for an arbitrary pair of opponent locations.
pub fn reaction_three_any(c_l: f64, c_r: f64, a: f64) -> Result<ResponseSet, ReactionError> {
    let (belief, mirrored) = normalize_belief(c_l, c_r)?;
    let response = reaction_three_symmetric(belief, a)?;
    Ok(if mirrored {
        response.mirrored()
    } else {
        response
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(set: &ResponseSet) -> f64 {
        match set {
            ResponseSet::Points { points } if points.len() == 1 => points[0],
            other => panic!("expected one point, got {other:?}"),
        }
    }

    fn p13() -> ModelParams {
        ModelParams::two(1.0, 3.0).unwrap()
    }

    #[test]
    fn firm1_branches() {
        assert!((single(&reaction_firm1_two(0.5, &p13()).unwrap()) - 0.5).abs() < 1e-15);
        assert!((single(&reaction_firm1_two(0.9, &p13()).unwrap()) - 0.78).abs() < 1e-15);
        assert!((single(&reaction_firm1_two(0.0, &p13()).unwrap()) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn firm1_is_continuous_at_breakpoints() {
        for (a1, a2) in [(1.0, 3.0), (0.2, 0.5), (2.0, 9.0)] {
            let params = ModelParams::two(a1, a2).unwrap();
            let gamma = 1.0 + a1 + a2;
            for t in [a1 / (a1 + a2), a2 / (a1 + a2)] {
                let at = single(&reaction_firm1_two(t, &params).unwrap());
                let left = (t + a1) / gamma;
                let right = (t + a2) / gamma;
                let nearest = (at - left).abs().min((at - right).abs());
                assert!(nearest < 1e-12, "jump at {t}: {at} vs {left}/{right}");
            }
        }
    }

    #[test]
    fn firm2_branches() {
        match reaction_firm2_two(0.5, &p13()).unwrap() {
            ResponseSet::Points { points } => {
                assert_eq!(points.len(), 2);
                assert!((points[0] - 0.3).abs() < 1e-15);
                assert!((points[1] - 0.7).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!((single(&reaction_firm2_two(0.2, &p13()).unwrap()) - 0.64).abs() < 1e-15);
        assert!((single(&reaction_firm2_two(0.8, &p13()).unwrap()) - 0.36).abs() < 1e-15);
        // Snapping only reaches exact halves up to float noise.
        assert_eq!(
            reaction_firm2_two(0.5 + 1e-13, &p13())
                .unwrap()
                .samples(2)
                .len(),
            2
        );
        assert_eq!(
            reaction_firm2_two(0.5 + 1e-9, &p13())
                .unwrap()
                .samples(2)
                .len(),
            1
        );
    }

    #[test]
    fn asymmetric_routines_reject_bad_orientation() {
        let flipped = ModelParams::two(3.0, 1.0).unwrap();
        assert!(matches!(
            reaction_firm1_two(0.5, &flipped),
            Err(ReactionError::NotAsymmetric { .. })
        ));
        let three = ModelParams::symmetric(3, 1.0).unwrap();
        assert!(matches!(
            reaction_firm2_two(0.5, &three),
            Err(ReactionError::WrongFirmCount {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn dispatch_relabels_firms() {
        let flipped = ModelParams::two(3.0, 1.0).unwrap();
        // Caller's firm 1 (index 1) is the efficient one here.
        let r = reaction_two(1, 0.9, &flipped).unwrap();
        assert!((single(&r) - 0.78).abs() < 1e-15);
        let r = reaction_two(0, 0.2, &flipped).unwrap();
        assert!((single(&r) - 0.64).abs() < 1e-15);
        let sym = ModelParams::two(1.0, 1.0).unwrap();
        assert!((single(&reaction_two(0, 0.0, &sym).unwrap()) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_two_firm_map() {
        assert!((single(&reaction_symmetric_two(0.0, 1.0).unwrap()) - 1.0 / 3.0).abs() < 1e-15);
        assert!((single(&reaction_symmetric_two(0.5, 1.0).unwrap()) - 0.5).abs() < 1e-15);
        assert!((single(&reaction_symmetric_two(1.0, 2.0).unwrap()) - 0.6).abs() < 1e-15);
        assert!(reaction_symmetric_two(0.5, -1.0).is_err());
    }

    #[test]
    fn belief_normalization() {
        let (b, m) = normalize_belief(0.9, 0.1).unwrap();
        assert_eq!((b.c_l, b.c_r, m), (0.1, 0.9, false));
        let (b, m) = normalize_belief(0.1, 0.3).unwrap();
        assert!((b.c_l - 0.7).abs() < 1e-15 && (b.c_r - 0.9).abs() < 1e-15 && m);
        let (b, m) = normalize_belief(0.3, 0.7).unwrap();
        assert_eq!((b.c_l, b.c_r, m), (0.3, 0.7, false));
        assert!(BeliefRegion::new(0.1, 0.3).is_err());
    }

    #[test]
    fn boundaries_at_unit_inefficiency() {
        let b = region_boundaries_three(1.0).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() < 1e-15;
        assert!(close(b.diagonal_split, 3.0 / 4.0));
        assert!(close(b.plateau_start, 5.0 / 7.0));
        assert!(close(b.lower_split, 7.0 / 12.0));
        assert!(close(b.region1_edge, 6.0 / 7.0));
        assert!(close(b.plateau_edge, 1.0 / 3.0));
        assert!(close(b.plateau_start_c_l, 2.0 / 7.0));
        assert!(close(b.lower_split_c_l, 5.0 / 12.0));
    }

    #[test]
    fn boundaries_small_inefficiency_limit() {
        let b = region_boundaries_three(1e-9).unwrap();
        assert!((b.diagonal_split - 1.0).abs() < 1e-8);
        assert!((b.plateau_start - 0.75).abs() < 1e-8);
        assert!((b.lower_split - 0.5).abs() < 1e-8);
    }

    #[test]
    fn boundaries_at_two() {
        // a = 2: 5/7, 7/10, 17/28, 15/19, 1/3, 3/10, 11/28.
        let b = region_boundaries_three(2.0).unwrap();
        let expected = [
            5.0 / 7.0,
            7.0 / 10.0,
            17.0 / 28.0,
            15.0 / 19.0,
            1.0 / 3.0,
            3.0 / 10.0,
            11.0 / 28.0,
        ];
        let got = [
            b.diagonal_split,
            b.plateau_start,
            b.lower_split,
            b.region1_edge,
            b.plateau_edge,
            b.plateau_start_c_l,
            b.lower_split_c_l,
        ];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-15, "{g} vs {e}");
        }
    }

    #[test]
    fn plateau_beliefs_from_worked_example() {
        let r = reaction_three_symmetric(BeliefRegion::new(1.0 / 3.0, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!(r.samples(2).len(), 2);
        assert!((r.min() - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.max() - 5.0 / 6.0).abs() < 1e-15);

        let r = reaction_three_symmetric(BeliefRegion::new(11.0 / 36.0, 5.0 / 6.0).unwrap(), 1.0)
            .unwrap();
        assert!((r.min() - 11.0 / 36.0).abs() < 1e-15);
        assert!((r.max() - 55.0 / 72.0).abs() < 1e-15);
    }

    #[test]
    fn far_right_belief_uses_region_one() {
        let belief = BeliefRegion::new(0.9, 0.95).unwrap();
        let hits = matching_branches(belief, 1.0, BRANCH_TOL);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].region, 1);
        let r = reaction_three_symmetric(belief, 1.0).unwrap();
        assert!((single(&r) - 0.57).abs() < 1e-15);
    }

    #[test]
    fn plateau_corner_has_smallest_choice() {
        let belief = BeliefRegion::new(2.0 / 7.0, 5.0 / 7.0).unwrap();
        let r = reaction_three_symmetric(belief, 1.0).unwrap();
        assert!((r.min() - 2.0 / 7.0).abs() < 1e-12);
        assert!((r.max() - 5.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_domain_is_enforced() {
        let outside = BeliefRegion { c_l: 0.1, c_r: 0.3 };
        assert!(matches!(
            reaction_three_symmetric(outside, 1.0),
            Err(ReactionError::OutsideReducedDomain { .. })
        ));
        let r = reaction_three_any(0.1, 0.3, 1.0).unwrap();
        let direct = reaction_three_symmetric(BeliefRegion::new(0.7, 0.9).unwrap(), 1.0).unwrap();
        assert_eq!(r, direct.mirrored());
    }

    #[test]
    fn hausdorff_against_points() {
        let set = ResponseSet::Interval { lo: 0.2, hi: 0.6 };
        assert!((set.hausdorff_to_points(&[0.2, 0.6]) - 0.2).abs() < 1e-15);
        assert!((set.hausdorff_to_points(&[0.2, 0.4, 0.6]) - 0.1).abs() < 1e-15);
        let pts = ResponseSet::Points {
            points: vec![0.3, 0.7],
        };
        assert!((pts.hausdorff_to_points(&[0.3, 0.71]) - 0.01).abs() < 1e-15);
    }
}
