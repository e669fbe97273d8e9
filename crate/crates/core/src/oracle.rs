//! Brute-force counterparts of the analytic results on a uniform grid.
//!
//! Every share comes from the cut solver; nothing here uses the closed-form
//! reaction functions or round updates. [`grid_eliminate`] applies the
//! elimination definition literally: a grid point survives round `k` if,
//! against some surviving opponent profile, no other surviving point of
//! the same firm does better by more than `eps_opt`.

use serde::Serialize;
use thiserror::Error;

use crate::elimination::{ChoiceSet, EliminationTrace, Interval};
use crate::exec::Exec;
use crate::market::{CutSolver, MarketError, ModelParams};

pub const DEFAULT_ELIMINATION_M: usize = 1_000;
pub const DEFAULT_RESPONSE_M: usize = 10_000;
/// Default optimality slack is `EPS_OPT_SCALE / m` share units.
///
/// Shares are piecewise linear in the own location with kink slopes of
/// roughly 1/6 or more, so a slack of `k/m` widens a sharp maximum by about
/// `6k` grid steps; `k` must stay well under 1/3 to respect a two-step
/// comparison bound. It must also cover the loss from beliefs that sit up
/// to one step short of a region boundary: with three firms at `a = 1` the
/// plateau corner `5/7` is off the `m = 1000` grid, and the centre points
/// then trail the best surviving point by about `0.4 * 2.9e-4`. 0.15 clears
/// both with room to spare.
pub const EPS_OPT_SCALE: f64 = 0.15;

pub fn default_eps_opt(m: usize) -> f64 {
    EPS_OPT_SCALE / m as f64
}

/// Residual bound handed to the cut solver.
pub const SHARE_TOL: f64 = 1e-12;
/// Smallest resolution accepted by [`grid_eliminate`].
pub const MIN_ELIMINATION_M: usize = 100;
/// Counterexamples kept verbatim; the rest are only counted.
pub const MAX_LOGGED_COUNTEREXAMPLES: usize = 100;

const BLOCK: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("grid resolution must be at least {min}, got {m}")]
    BadResolution { m: usize, min: usize },
    #[error("eps_opt must be finite and nonnegative, got {0}")]
    BadEps(f64),
    #[error("expected {expected} opponent locations, got {got}")]
    BadOpponents { expected: usize, got: usize },
    #[error("no grid point lies in the restriction set")]
    EmptyRestriction,
    #[error("grid elimination supports two firms or three symmetric firms")]
    Unsupported,
    #[error("traces do not describe the same model: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    m: usize,
    eps_opt: f64,
    #[serde(skip)]
    exec: Exec,
}

impl Grid {
    pub fn new(m: usize, eps_opt: f64) -> Result<Self, OracleError> {
        if m < 2 {
            return Err(OracleError::BadResolution { m, min: 2 });
        }
        if !(eps_opt >= 0.0 && eps_opt.is_finite()) {
            return Err(OracleError::BadEps(eps_opt));
        }
        Ok(Grid {
            m,
            eps_opt,
            exec: Exec::default(),
        })
    }

    /// Grid with the default slack [`default_eps_opt`].
    pub fn standard(m: usize) -> Result<Self, OracleError> {
        Self::new(m, default_eps_opt(m.max(1)))
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn step(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn eps_opt(&self) -> f64 {
        self.eps_opt
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 / self.m as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.m).map(|i| self.point(i)).collect()
    }

    /// Grid points lying in `set`.
    pub fn mask_of(&self, set: &ChoiceSet) -> Vec<bool> {
        (0..=self.m)
            .map(|i| set.contains_point(self.point(i), 1e-12))
            .collect()
    }

    /// Runs of consecutive marked points as closed intervals.
    pub fn set_of(&self, mask: &[bool]) -> ChoiceSet {
        let mut v = Vec::new();
        let mut start = None;
        for (i, &on) in mask.iter().chain(std::iter::once(&false)).enumerate() {
            match (on, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    v.push(Interval {
                        lo: self.point(s),
                        hi: self.point(i - 1),
                    });
                    start = None;
                }
                _ => {}
            }
        }
        ChoiceSet::new(v).expect("grid points lie in [0, 1]")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResponse {
    /// Indices of the `eps_opt`-optimal grid points.
    pub indices: Vec<usize>,
    pub points: Vec<f64>,
    pub best_share: f64,
}

impl GridResponse {
    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }
}

/// Evaluates `f(solver, i)` for every grid index in `cands`, in fixed blocks,
/// so warm starts never depend on how the work was split.
fn block_map<T, F>(exec: Exec, cands: &[usize], f: F) -> Result<Vec<T>, OracleError>
where
    T: Send,
    F: Fn(&mut CutSolver, usize) -> Result<T, MarketError> + Sync + Send,
{
    let blocks = cands.len().div_ceil(BLOCK);
    let out = exec.map_indexed(blocks, CutSolver::new, |solver, b| {
        solver.reset_hint();
        let lo = b * BLOCK;
        let hi = (lo + BLOCK).min(cands.len());
        cands[lo..hi]
            .iter()
            .map(|&i| f(solver, i))
            .collect::<Result<Vec<T>, _>>()
    });
    let mut flat = Vec::with_capacity(cands.len());
    for block in out {
        flat.extend(block?);
    }
    Ok(flat)
}

/// Grid points within `eps_opt` of the best share for `firm` against
/// `opponents` (the other firms' locations, in firm order).
pub fn grid_best_response(
    firm: usize,
    opponents: &[f64],
    params: &ModelParams,
    grid: &Grid,
    restrict_to: Option<&ChoiceSet>,
) -> Result<GridResponse, OracleError> {
    let n = params.n();
    if firm >= n {
        return Err(MarketError::FirmOutOfRange {
            index: firm,
            firms: n,
        }
        .into());
    }
    if opponents.len() != n - 1 {
        return Err(OracleError::BadOpponents {
            expected: n - 1,
            got: opponents.len(),
        });
    }
    let cands: Vec<usize> = match restrict_to {
        Some(set) => (0..=grid.m)
            .filter(|&i| set.contains_point(grid.point(i), 1e-12))
            .collect(),
        None => (0..=grid.m).collect(),
    };
    if cands.is_empty() {
        return Err(OracleError::EmptyRestriction);
    }
    let template: Vec<f64> = (0..n)
        .map(|k| match k.cmp(&firm) {
            std::cmp::Ordering::Less => opponents[k],
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => opponents[k - 1],
        })
        .collect();
    let shares = block_map(grid.exec, &cands, |solver, i| {
        let mut loc = template.clone();
        loc[firm] = grid.point(i);
        solver.share_of(firm, &loc, params, SHARE_TOL)
    })?;
    let best_share = shares.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let indices: Vec<usize> = cands
        .iter()
        .zip(&shares)
        .filter(|(_, &s)| s >= best_share - grid.eps_opt)
        .map(|(&i, _)| i)
        .collect();
    Ok(GridResponse {
        points: indices.iter().map(|&i| grid.point(i)).collect(),
        indices,
        best_share,
    })
}

/// A grid point that is optimal against a surviving belief when compared
/// with all of `[0, 1]`, yet was already eliminated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub round: usize,
    pub firm: usize,
    pub point: f64,
    pub belief: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridElimination {
    pub trace: EliminationTrace,
    /// First [`MAX_LOGGED_COUNTEREXAMPLES`] unrestricted counterexamples.
    pub counterexamples: Vec<Counterexample>,
    pub counterexample_count: usize,
    /// Whether unrestricted responses were checked at all.
    pub tracked_unrestricted: bool,
}

/// Literal grid elimination for two firms or three symmetric firms.
///
/// Stops when a round removes nothing (recorded as `converged_at`) or after
/// `max_rounds`. With `track_unrestricted`, each belief also gets an
/// unrestricted grid best response, and any optimal point already
/// eliminated is reported as a counterexample.
pub fn grid_eliminate(
    params: &ModelParams,
    grid: &Grid,
    max_rounds: usize,
    track_unrestricted: bool,
) -> Result<GridElimination, OracleError> {
    if grid.m < MIN_ELIMINATION_M {
        return Err(OracleError::BadResolution {
            m: grid.m,
            min: MIN_ELIMINATION_M,
        });
    }
    match params.n() {
        2 => eliminate_two(params, grid, max_rounds, track_unrestricted),
        3 if params.is_symmetric() => eliminate_three(params, grid, max_rounds, track_unrestricted),
        _ => Err(OracleError::Unsupported),
    }
}

#[derive(Default)]
struct Log {
    kept: Vec<Counterexample>,
    count: usize,
}

impl Log {
    fn record(&mut self, c: Counterexample) {
        self.count += 1;
        if self.kept.len() < MAX_LOGGED_COUNTEREXAMPLES {
            self.kept.push(c);
        }
    }
}

fn eliminate_two(
    params: &ModelParams,
    grid: &Grid,
    max_rounds: usize,
    track: bool,
) -> Result<GridElimination, OracleError> {
    let len = grid.len();
    let all: Vec<usize> = (0..len).collect();
    // Shares never change between rounds, so firm 1's share table is built
    // once; firm 2's share is its complement because the cuts sum to 1.
    let rows = grid.exec.map_indexed(len, CutSolver::new, |solver, i| {
        solver.reset_hint();
        let mut loc = [grid.point(i), 0.0];
        (0..len)
            .map(|j| {
                loc[1] = grid.point(j);
                solver.share_of(0, &loc, params, SHARE_TOL)
            })
            .collect::<Result<Vec<f64>, _>>()
    });
    let table = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let share = |firm: usize, own: usize, other: usize| match firm {
        0 => table[own][other],
        _ => 1.0 - table[other][own],
    };

    let mut masks = [vec![true; len], vec![true; len]];
    let mut trace = EliminationTrace::start(params.inefficiencies().to_vec());
    let mut log = Log::default();
    for round in 1..=max_rounds {
        let mut next = [vec![false; len], vec![false; len]];
        for firm in 0..2 {
            let (own, other) = (&masks[firm], &masks[1 - firm]);
            for j in all.iter().copied().filter(|&j| other[j]) {
                let best = (0..len)
                    .filter(|&i| own[i])
                    .map(|i| share(firm, i, j))
                    .fold(f64::NEG_INFINITY, f64::max);
                for i in (0..len).filter(|&i| own[i]) {
                    if share(firm, i, j) >= best - grid.eps_opt {
                        next[firm][i] = true;
                    }
                }
                if track {
                    let free = (0..len)
                        .map(|i| share(firm, i, j))
                        .fold(f64::NEG_INFINITY, f64::max);
                    for i in (0..len).filter(|&i| !own[i]) {
                        if share(firm, i, j) >= free - grid.eps_opt {
                            log.record(Counterexample {
                                round,
                                firm,
                                point: grid.point(i),
                                belief: vec![grid.point(j)],
                            });
                        }
                    }
                }
            }
        }
        let unchanged = next == masks;
        masks = next;
        trace.push(vec![grid.set_of(&masks[0]), grid.set_of(&masks[1])]);
        if unchanged {
            trace.converged_at = Some(round);
            break;
        }
    }
    trace.finish(0.0);
    Ok(GridElimination {
        trace,
        counterexamples: log.kept,
        counterexample_count: log.count,
        tracked_unrestricted: track,
    })
}

struct RowOutcome {
    marks: Vec<bool>,
    counterexamples: Vec<(usize, usize, usize)>,
}

fn eliminate_three(
    params: &ModelParams,
    grid: &Grid,
    max_rounds: usize,
    track: bool,
) -> Result<GridElimination, OracleError> {
    let m = grid.m;
    let len = grid.len();
    let mut mask = vec![true; len];
    let mut trace = EliminationTrace::start(params.inefficiencies().to_vec());
    let mut log = Log::default();
    for round in 1..=max_rounds {
        let alive: Vec<usize> = (0..len).filter(|&i| mask[i]).collect();
        let pool: &[usize] = if track {
            &(0..len).collect::<Vec<_>>()
        } else {
            &alive
        };
        let pool = pool.to_vec();
        // Beliefs (l, r) with l <= r and l + r >= m cover the reduced domain;
        // the rest follow by reflection. One task per r.
        let rows: Vec<Result<RowOutcome, MarketError>> =
            grid.exec
                .map_indexed(alive.len(), CutSolver::new, |solver, ri| {
                    solver.reset_hint();
                    let r = alive[ri];
                    let mut out = RowOutcome {
                        marks: vec![false; len],
                        counterexamples: Vec::new(),
                    };
                    let mut shares = vec![0.0; pool.len()];
                    for &l in alive.iter().filter(|&&l| l <= r && l + r >= m) {
                        let mut loc = [0.0, grid.point(l), grid.point(r)];
                        for (k, &i) in pool.iter().enumerate() {
                            loc[0] = grid.point(i);
                            shares[k] = solver.share_of(0, &loc, params, SHARE_TOL)?;
                        }
                        let restricted = pool
                            .iter()
                            .zip(&shares)
                            .filter(|(&i, _)| mask[i])
                            .map(|(_, &s)| s)
                            .fold(f64::NEG_INFINITY, f64::max);
                        for (&i, &s) in pool.iter().zip(&shares) {
                            if mask[i] && s >= restricted - grid.eps_opt {
                                out.marks[i] = true;
                            }
                        }
                        if track {
                            let free = shares.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                            for (&i, &s) in pool.iter().zip(&shares) {
                                if !mask[i] && s >= free - grid.eps_opt {
                                    out.counterexamples.push((i, l, r));
                                }
                            }
                        }
                    }
                    Ok(out)
                });
        let mut marks = vec![false; len];
        for row in rows {
            let row = row?;
            for (i, &on) in row.marks.iter().enumerate() {
                if on {
                    marks[i] = true;
                    marks[m - i] = true;
                }
            }
            for (i, l, r) in row.counterexamples {
                log.record(Counterexample {
                    round,
                    firm: 0,
                    point: grid.point(i),
                    belief: vec![grid.point(l), grid.point(r)],
                });
            }
        }
        let next: Vec<bool> = (0..len).map(|i| mask[i] && marks[i]).collect();
        let unchanged = next == mask;
        mask = next;
        let set = grid.set_of(&mask);
        trace.push(vec![set.clone(), set.clone(), set]);
        if unchanged {
            trace.converged_at = Some(round);
            break;
        }
    }
    trace.finish(0.0);
    Ok(GridElimination {
        trace,
        counterexamples: log.kept,
        counterexample_count: log.count,
        tracked_unrestricted: track,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceComparison {
    /// Largest per-firm Hausdorff gap for each round both traces reached.
    pub round_gaps: Vec<f64>,
    pub limit_gap: f64,
    /// `2 / m + eps_opt`.
    pub threshold: f64,
    pub flagged_rounds: Vec<usize>,
    pub limit_ok: bool,
}

impl TraceComparison {
    pub fn passed(&self) -> bool {
        self.limit_ok && self.flagged_rounds.is_empty()
    }
}

pub fn compare_traces(
    analytic: &EliminationTrace,
    grid_trace: &EliminationTrace,
    grid: &Grid,
) -> Result<TraceComparison, OracleError> {
    if analytic.inefficiencies != grid_trace.inefficiencies {
        return Err(OracleError::Mismatch(format!(
            "inefficiencies {:?} vs {:?}",
            analytic.inefficiencies, grid_trace.inefficiencies
        )));
    }
    if analytic.limit.len() != grid_trace.limit.len() {
        return Err(OracleError::Mismatch("different firm counts".into()));
    }
    let gap = |x: &[ChoiceSet], y: &[ChoiceSet]| {
        x.iter()
            .zip(y)
            .map(|(p, q)| p.hausdorff(q))
            .fold(0.0, f64::max)
    };
    let threshold = 2.0 * grid.step() + grid.eps_opt;
    let round_gaps: Vec<f64> = analytic
        .rounds
        .iter()
        .zip(&grid_trace.rounds)
        .map(|(x, y)| gap(x, y))
        .collect();
    let flagged_rounds = round_gaps
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > threshold)
        .map(|(k, _)| k)
        .collect();
    let limit_gap = gap(&analytic.limit, &grid_trace.limit);
    Ok(TraceComparison {
        round_gaps,
        limit_gap,
        threshold,
        flagged_rounds,
        limit_ok: limit_gap <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_basics() {
        let g = Grid::new(10, 0.0).unwrap();
        assert_eq!(g.points().len(), 11);
        assert_eq!(g.point(10), 1.0);
        let mut mask = vec![false; 11];
        for i in [2, 3, 4, 7] {
            mask[i] = true;
        }
        let s = g.set_of(&mask);
        assert_eq!(s.len(), 2);
        assert_eq!(g.mask_of(&s), mask);
        assert!(Grid::new(1, 0.0).is_err());
        assert!(Grid::new(10, -1.0).is_err());
    }

    #[test]
    fn firm_one_response_on_fine_grid() {
        let params = ModelParams::two(1.0, 3.0).unwrap();
        let g = Grid::standard(DEFAULT_RESPONSE_M).unwrap();
        let r = grid_best_response(0, &[0.9], &params, &g, None).unwrap();
        assert!((r.min() - 0.78).abs() <= g.step() && (r.max() - 0.78).abs() <= g.step());
    }

    #[test]
    fn symmetric_centre_response() {
        let params = ModelParams::two(1.0, 1.0).unwrap();
        let g = Grid::standard(1_000).unwrap();
        let r = grid_best_response(1, &[0.5], &params, &g, None).unwrap();
        assert!((r.min() - 0.5).abs() <= g.step() && (r.max() - 0.5).abs() <= g.step());
    }

    #[test]
    fn three_firm_plateau() {
        let params = ModelParams::symmetric(3, 1.0).unwrap();
        let g = Grid::standard(2_000).unwrap();
        let r = grid_best_response(0, &[1.0 / 3.0, 1.0], &params, &g, None).unwrap();
        assert!((r.min() - 1.0 / 3.0).abs() <= 2.0 * g.step());
        assert!((r.max() - 5.0 / 6.0).abs() <= 2.0 * g.step());
    }

    #[test]
    fn restriction_limits_candidates() {
        let params = ModelParams::two(1.0, 3.0).unwrap();
        let g = Grid::standard(1_000).unwrap();
        let only = ChoiceSet::interval(0.1, 0.5).unwrap();
        let r = grid_best_response(0, &[0.9], &params, &g, Some(&only)).unwrap();
        assert_eq!(r.points, vec![0.5]);
        let none = ChoiceSet::interval(0.1234, 0.1235).unwrap();
        assert_eq!(
            grid_best_response(0, &[0.9], &params, &g, Some(&none)),
            Err(OracleError::EmptyRestriction)
        );
    }

    #[test]
    fn first_round_of_two_firm_elimination() {
        let params = ModelParams::two(1.0, 3.0).unwrap();
        let g = Grid::standard(200).unwrap();
        let out = grid_eliminate(&params, &g, 1, false).unwrap();
        let p1 = &out.trace.rounds[1][0];
        assert!(p1.hausdorff(&ChoiceSet::interval(0.2, 0.8).unwrap()) <= 2.0 * g.step());
        assert!(out.trace.converged_at.is_none());
    }

    #[test]
    fn identical_traces_compare_clean() {
        let params = ModelParams::two(1.0, 3.0).unwrap();
        let t = crate::elimination::iterate_two_firm(&params, 1e-9, 10_000).unwrap();
        let g = Grid::new(100, 0.0).unwrap();
        let c = compare_traces(&t, &t, &g).unwrap();
        assert!(c.round_gaps.iter().all(|&x| x == 0.0) && c.limit_gap == 0.0 && c.passed());
        let other = crate::elimination::iterate_symmetric_two(1.0, 1e-9, 10_000).unwrap();
        assert!(matches!(
            compare_traces(&t, &other, &g),
            Err(OracleError::Mismatch(_))
        ));
    }

    #[test]
    fn rejects_unsupported_models() {
        let g = Grid::new(100, 0.0).unwrap();
        let p = ModelParams::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(
            grid_eliminate(&p, &g, 5, false).unwrap_err(),
            OracleError::Unsupported
        );
        let coarse = Grid::new(50, 0.0).unwrap();
        assert!(grid_eliminate(&ModelParams::two(1.0, 3.0).unwrap(), &coarse, 5, false).is_err());
    }
}
