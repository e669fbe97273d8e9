//! Two-firm elimination.
//!
//! With `a_1 < a_2` and `gamma = 1 + a_1 + a_2`, both surviving sets stay
//! symmetric about 1/2. Firm 1 contracts `[l_2, 1 - l_2]` to
//! `[(l_2 + a_1)/gamma, (1 - l_2 + a_2)/gamma]` until `P_2` lies inside its
//! copy zone `[a_1/(a_1+a_2), a_2/(a_1+a_2)]`, after which it copies `P_2`.
//! Firm 2 answers a centred interval `[l_1, 1 - l_1]` with one of three
//! shapes depending on `l_1`; once `P_1` has split, it maps each half onto
//! the opposite side. Both halves then contract to the two limit points.

use serde::Serialize;

use super::choice_set::{ChoiceSet, Interval, MERGE_TOL};
use super::trace::EliminationTrace;
use super::EliminationError;
use crate::market::ModelParams;

/// Symmetry slack for round states.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FirmOneRule {
    /// `P_2` reaches outside the copy zone: contract its hull.
    Contract,
    /// `P_2` sits inside the copy zone: `P_1` becomes `P_2`.
    Copy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FirmTwoRule {
    /// `l_1 < 1/2 - (a_2 - a_1)`: a single interval reaching past the centre images.
    Wide,
    /// `l_1` between the two thresholds: `[(1/2 + a_1)/gamma, (1/2 + a_2)/gamma]`.
    Centre,
    /// `l_1 > 1/2 - (a_2 - a_1)/2`: the image splits in two.
    Split,
    /// `P_1` already split: each half maps to the opposite side.
    Crossed,
}

/// Endpoints `[d_lo, d_hi] U [u_lo, u_hi]` of a split `P_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitEndpoints {
    pub d_lo: f64,
    pub d_hi: f64,
    pub u_lo: f64,
    pub u_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoFirmRoundState {
    pub round: usize,
    pub p1: ChoiceSet,
    pub p2: ChoiceSet,
    /// `min P_1`.
    pub l1: f64,
    /// `min P_2`.
    pub l2: f64,
    pub split: Option<SplitEndpoints>,
    /// Rules that produced this state; `None` for round 0.
    pub rules: Option<(FirmOneRule, FirmTwoRule)>,
}

impl TwoFirmRoundState {
    pub fn initial() -> Self {
        Self::from_sets(0, ChoiceSet::full(), ChoiceSet::full(), None)
    }

    fn from_sets(
        round: usize,
        p1: ChoiceSet,
        p2: ChoiceSet,
        rules: Option<(FirmOneRule, FirmTwoRule)>,
    ) -> Self {
        let split = match p2.intervals() {
            [d, u] => Some(SplitEndpoints {
                d_lo: d.lo,
                d_hi: d.hi,
                u_lo: u.lo,
                u_hi: u.hi,
            }),
            _ => None,
        };
        TwoFirmRoundState {
            round,
            l1: p1.min().unwrap_or(f64::NAN),
            l2: p2.min().unwrap_or(f64::NAN),
            p1,
            p2,
            split,
            rules,
        }
    }

    /// Builds a state from explicit sets, checking the round invariants.
    pub fn new(round: usize, p1: ChoiceSet, p2: ChoiceSet) -> Result<Self, EliminationError> {
        let s = Self::from_sets(round, p1, p2, None);
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), EliminationError> {
        for (name, set) in [("P_1", &self.p1), ("P_2", &self.p2)] {
            if set.is_empty() || set.len() > 2 {
                return Err(EliminationError::BadState(format!(
                    "{name} must be one or two intervals, got {set}"
                )));
            }
            if !set.is_symmetric(SYMMETRY_TOL) {
                return Err(EliminationError::BadState(format!(
                    "{name} = {set} is not symmetric about 1/2"
                )));
            }
        }
        Ok(())
    }
}

fn oriented(params: &ModelParams) -> Result<(f64, f64), EliminationError> {
    if params.n() != 2 {
        return Err(EliminationError::WrongFirmCount {
            expected: 2,
            got: params.n(),
        });
    }
    let (a1, a2) = (params.a(0), params.a(1));
    if a1 >= a2 {
        return Err(EliminationError::NotAsymmetric { a1, a2 });
    }
    Ok((a1, a2))
}

fn span(lo: f64, hi: f64) -> Interval {
    Interval { lo, hi }
}

fn build(v: Vec<Interval>) -> Result<ChoiceSet, EliminationError> {
    ChoiceSet::new(v).map_err(|e| EliminationError::BadState(e.to_string()))
}

/// One simultaneous round: both firms respond to the other's previous set.
pub fn round_two_firm(
    state: &TwoFirmRoundState,
    params: &ModelParams,
) -> Result<TwoFirmRoundState, EliminationError> {
    let (a1, a2) = oriented(params)?;
    state.validate()?;
    let gamma = 1.0 + a1 + a2;

    let (p1, rule1) = if state.l2 >= a1 / (a1 + a2) {
        (state.p2.clone(), FirmOneRule::Copy)
    } else {
        if state.p2.len() != 1 {
            return Err(EliminationError::BadState(format!(
                "split P_2 = {} reaches below the copy zone",
                state.p2
            )));
        }
        let l2 = state.l2;
        let set = build(vec![span((l2 + a1) / gamma, (1.0 - l2 + a2) / gamma)])?;
        (set, FirmOneRule::Contract)
    };

    let (p2, rule2) = match state.p1.intervals() {
        [_] => {
            let l1 = state.l1;
            let wide = 0.5 - (a2 - a1);
            let split = 0.5 - 0.5 * (a2 - a1);
            if l1 < wide {
                let set = build(vec![span((l1 + a2) / gamma, (1.0 - l1 + a1) / gamma)])?;
                (set, FirmTwoRule::Wide)
            } else if l1 <= split {
                let set = build(vec![span((0.5 + a1) / gamma, (0.5 + a2) / gamma)])?;
                (set, FirmTwoRule::Centre)
            } else {
                let set = build(vec![
                    span((0.5 + a1) / gamma, (1.0 - l1 + a1) / gamma),
                    span((l1 + a2) / gamma, (0.5 + a2) / gamma),
                ])?;
                (set, FirmTwoRule::Split)
            }
        }
        [d, u] => {
            let set = build(vec![
                span((u.lo + a1) / gamma, (u.hi + a1) / gamma),
                span((d.lo + a2) / gamma, (d.hi + a2) / gamma),
            ])?;
            (set, FirmTwoRule::Crossed)
        }
        _ => unreachable!("validated above"),
    };

    let next = TwoFirmRoundState::from_sets(state.round + 1, p1, p2, Some((rule1, rule2)));
    next.validate()?;
    if !state.p1.contains(&next.p1, MERGE_TOL) || !state.p2.contains(&next.p2, MERGE_TOL) {
        return Err(EliminationError::BadState(format!(
            "round {} does not nest inside round {}",
            next.round, state.round
        )));
    }
    Ok(next)
}

fn check_run(tol: f64, max_rounds: usize) -> Result<(), EliminationError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(EliminationError::BadTolerance(tol));
    }
    if max_rounds == 0 {
        return Err(EliminationError::BadRoundCap);
    }
    Ok(())
}

/// Runs [`round_two_firm`] until the Hausdorff gap between rounds and the
/// width of every piece are both at most `tol`.
///
/// Works in either firm order: when `a_1 > a_2` the firms are swapped
/// internally and the trace relabelled on the way out.
pub fn iterate_two_firm(
    params: &ModelParams,
    tol: f64,
    max_rounds: usize,
) -> Result<EliminationTrace, EliminationError> {
    iterate_two_firm_states(params, tol, max_rounds).map(|(t, _)| t)
}

/// Like [`iterate_two_firm`], also returning the oriented round states.
pub fn iterate_two_firm_states(
    params: &ModelParams,
    tol: f64,
    max_rounds: usize,
) -> Result<(EliminationTrace, Vec<TwoFirmRoundState>), EliminationError> {
    check_run(tol, max_rounds)?;
    if params.n() != 2 {
        return Err(EliminationError::WrongFirmCount {
            expected: 2,
            got: params.n(),
        });
    }
    let flipped = params.a(0) > params.a(1);
    let work = if flipped {
        params.reversed()
    } else {
        params.clone()
    };
    oriented(&work)?;

    let mut trace = EliminationTrace::start(work.inefficiencies().to_vec());
    let mut states = vec![TwoFirmRoundState::initial()];
    for _ in 0..max_rounds {
        let next = round_two_firm(states.last().expect("nonempty"), &work)?;
        let gap = trace.push(vec![next.p1.clone(), next.p2.clone()]);
        let width = next.p1.max_width().max(next.p2.max_width());
        states.push(next);
        // The limit is two points, so also wait for the pieces to narrow
        // enough to be reported as points.
        if gap <= tol && width <= tol {
            trace.converged_at = Some(trace.n_rounds());
            break;
        }
    }
    trace.finish(tol);
    if flipped {
        trace.swap_firms(0, 1);
    }
    if trace.converged() {
        Ok((trace, states))
    } else {
        Err(EliminationError::NonConverged(Box::new(trace)))
    }
}

/// Equal inefficiencies: both sets follow `[l, u] -> [(l + a)/(1+2a), (u + a)/(1+2a)]`.
pub fn iterate_symmetric_two(
    a: f64,
    tol: f64,
    max_rounds: usize,
) -> Result<EliminationTrace, EliminationError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(EliminationError::BadInefficiency(a));
    }
    check_run(tol, max_rounds)?;
    let scale = 1.0 + 2.0 * a;
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut trace = EliminationTrace::start(vec![a, a]);
    for _ in 0..max_rounds {
        lo = (lo + a) / scale;
        hi = (hi + a) / scale;
        let set = build(vec![span(lo, hi)])?;
        let gap = trace.push(vec![set.clone(), set]);
        // The sets nest around 1/2, so once the width is below `tol` the
        // collapsed limit is within `tol` of every later round as well.
        if gap <= tol && hi - lo <= tol {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() < 1e-12
    }

    fn ends(set: &ChoiceSet) -> Vec<(f64, f64)> {
        set.intervals().iter().map(|i| (i.lo, i.hi)).collect()
    }

    fn same(set: &ChoiceSet, want: &[(f64, f64)]) -> bool {
        let got = ends(set);
        got.len() == want.len()
            && got
                .iter()
                .zip(want)
                .all(|(g, w)| close(g.0, w.0) && close(g.1, w.1))
    }

    #[test]
    fn example_rounds() {
        let params = ModelParams::two(1.0, 3.0).unwrap();
        let s1 = round_two_firm(&TwoFirmRoundState::initial(), &params).unwrap();
        assert!(same(&s1.p1, &[(0.2, 0.8)]));
        assert!(same(&s1.p2, &[(0.3, 0.4), (0.6, 0.7)]));
        assert_eq!(s1.rules, Some((FirmOneRule::Contract, FirmTwoRule::Split)));

        let s2 = round_two_firm(&s1, &params).unwrap();
        assert_eq!(s2.p1, s1.p2);
        assert!(same(&s2.p2, &[(0.30, 0.36), (0.64, 0.70)]));

        let s3 = round_two_firm(&s2, &params).unwrap();
        assert_eq!(s3.p1, s2.p2);
        assert!(same(&s3.p2, &[(0.32, 0.34), (0.66, 0.68)]));
        assert_eq!(s3.rules, Some((FirmOneRule::Copy, FirmTwoRule::Crossed)));
        let split = s3.split.unwrap();
        assert!(close(split.d_lo, 0.32) && close(split.u_hi, 0.68));
    }

    #[test]
    fn converges_to_two_points() {
        for (a1, a2) in [(1.0, 3.0), (1.0, 2.0), (0.5, 0.6), (0.1, 10.0)] {
            let params = ModelParams::two(a1, a2).unwrap();
            let t = iterate_two_firm(&params, 1e-9, 10_000).unwrap();
            let s = a1 + a2 + 2.0;
            let want = ChoiceSet::points(&[(a1 + 1.0) / s, (a2 + 1.0) / s]).unwrap();
            for set in &t.limit {
                assert_eq!(set.len(), 2, "{a1},{a2}: {set}");
                assert!(set.intervals().iter().all(|i| i.is_point()), "{set}");
                assert!(set.hausdorff(&want) < 1e-6);
            }
            assert!(t.is_monotone(MERGE_TOL));
            assert!(t.limit_is_nested(1e-9));
        }
    }

    #[test]
    fn centre_case_is_exercised_for_small_gaps() {
        let params = ModelParams::two(0.5, 0.6).unwrap();
        let (_, states) = iterate_two_firm_states(&params, 1e-9, 10_000).unwrap();
        let rules: Vec<_> = states.iter().filter_map(|s| s.rules).map(|r| r.1).collect();
        assert!(rules.contains(&FirmTwoRule::Centre));
        assert!(rules.contains(&FirmTwoRule::Crossed));
    }

    #[test]
    fn wide_case_for_small_gaps() {
        let params = ModelParams::two(0.1, 0.3).unwrap();
        let s1 = round_two_firm(&TwoFirmRoundState::initial(), &params).unwrap();
        assert_eq!(s1.rules.unwrap().1, FirmTwoRule::Wide);
    }

    #[test]
    fn copy_rule_is_exact() {
        let params = ModelParams::two(0.3, 0.7).unwrap();
        let (_, states) = iterate_two_firm_states(&params, 1e-9, 10_000).unwrap();
        for w in states.windows(2) {
            if w[0].l2 >= 0.3 {
                assert_eq!(w[1].p1, w[0].p2);
            }
        }
    }

    #[test]
    fn geometric_contraction_after_split() {
        let params = ModelParams::two(1.0, 3.0).unwrap();
        let gamma: f64 = 5.0;
        let t = iterate_two_firm(&params, 1e-12, 10_000).unwrap();
        let g = &t.hausdorff_gaps;
        for k in 2..g.len().saturating_sub(4) {
            if g[k] > 1e-13 {
                assert!(
                    g[k + 4] <= g[k] / (gamma * gamma) * (1.0 + 1e-6) + 1e-15,
                    "k={k}"
                );
            }
        }
    }

    #[test]
    fn reverse_order_is_relabelled() {
        let fwd = iterate_two_firm(&ModelParams::two(1.0, 3.0).unwrap(), 1e-9, 10_000).unwrap();
        let rev = iterate_two_firm(&ModelParams::two(3.0, 1.0).unwrap(), 1e-9, 10_000).unwrap();
        assert_eq!(rev.inefficiencies, vec![3.0, 1.0]);
        assert_eq!(rev.rounds[1][0], fwd.rounds[1][1]);
        assert_eq!(rev.rounds[1][1], fwd.rounds[1][0]);
    }

    #[test]
    fn bad_inputs() {
        let sym = ModelParams::two(1.0, 1.0).unwrap();
        assert!(matches!(
            iterate_two_firm(&sym, 1e-9, 100),
            Err(EliminationError::NotAsymmetric { .. })
        ));
        let params = ModelParams::two(1.0, 3.0).unwrap();
        assert!(matches!(
            iterate_two_firm(&params, 1e-9, 2),
            Err(EliminationError::NonConverged(t)) if t.n_rounds() == 2 && !t.converged()
        ));
        let lopsided =
            TwoFirmRoundState::new(1, ChoiceSet::interval(0.1, 0.8).unwrap(), ChoiceSet::full());
        assert!(matches!(lopsided, Err(EliminationError::BadState(_))));
    }

    #[test]
    fn symmetric_pair() {
        let t = iterate_symmetric_two(1.0, 1e-9, 10_000).unwrap();
        assert!(same(&t.rounds[1][0], &[(1.0 / 3.0, 2.0 / 3.0)]));
        assert_eq!(t.limit[0], ChoiceSet::point(0.5).unwrap());
        let t = iterate_symmetric_two(2.0, 1e-9, 10_000).unwrap();
        assert!(same(&t.rounds[1][1], &[(0.4, 0.6)]));
        let t = iterate_symmetric_two(0.01, 1e-9, 10_000).unwrap();
        assert!((t.limit[0].min().unwrap() - 0.5).abs() < 1e-9);
    }
}
