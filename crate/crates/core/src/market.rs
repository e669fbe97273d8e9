//! Consumer assignment on the unit line with waiting costs.
//!
//! Given firm locations `c_1 <= ... <= c_n` and inefficiencies `a_i`, the
//! indifference cuts `0 = x_0 < x_1 < ... < x_n = 1` solve, for every
//! adjacent pair of firms,
//!
//! ```text
//! |c_i - x_i| + a_i (x_i - x_{i-1}) = |c_{i+1} - x_i| + a_{i+1} (x_{i+1} - x_i)
//! ```
//!
//! The system is solved by shooting on `x_1`: each row is linear in
//! `x_{i+1}` once `x_{i-1}` and `x_i` are known, and the terminal value
//! `x_n(x_1)` is strictly increasing, so a bracketing root finder on
//! `x_n(x_1) - 1` over `[0, 1]` always succeeds. The bracketed solution is
//! then refined by solving the tridiagonal linear system that matches its
//! sign pattern, which removes the error amplification of forward shooting.

use thiserror::Error;

/// Default bound on the indifference-system residual, in cost units.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Iteration cap for the bracketing stage of the cut solver.
pub const MAX_SHOOTING_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("the model needs at least two firms, got {0}")]
    TooFewFirms(usize),
    #[error("inefficiency a_{index} = {value} must be positive and finite")]
    BadInefficiency { index: usize, value: f64 },
    #[error("location of firm {index} is {value}, outside [0, 1]")]
    LocationOutOfRange { index: usize, value: f64 },
    #[error("profile has {locations} locations but the model has {firms} firms")]
    DimensionMismatch { locations: usize, firms: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("firm index {index} is out of range for {firms} firms")]
    FirmOutOfRange { index: usize, firms: usize },
    #[error("consumer position {0} lies outside [0, 1]")]
    ConsumerOutOfRange(f64),
    #[error("expected {expected} cuts, got {got}")]
    BadCuts { expected: usize, got: usize },
    #[error("cut solver stalled at residual {residual:e} above tolerance {tol:e}")]
    NonConvergence { residual: f64, tol: f64 },
}

/// Per-firm waiting-cost coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    inefficiencies: Vec<f64>,
}

impl ModelParams {
    pub fn new(inefficiencies: Vec<f64>) -> Result<Self, MarketError> {
        if inefficiencies.len() < 2 {
            return Err(MarketError::TooFewFirms(inefficiencies.len()));
        }
        for (index, &value) in inefficiencies.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(MarketError::BadInefficiency { index, value });
            }
        }
        Ok(Self { inefficiencies })
    }

    /// `n` firms sharing the inefficiency `a`.
    pub fn symmetric(n: usize, a: f64) -> Result<Self, MarketError> {
        Self::new(vec![a; n])
    }

    pub fn two(a1: f64, a2: f64) -> Result<Self, MarketError> {
        Self::new(vec![a1, a2])
    }

    pub fn n(&self) -> usize {
        self.inefficiencies.len()
    }

    pub fn inefficiencies(&self) -> &[f64] {
        &self.inefficiencies
    }

    pub fn a(&self, firm: usize) -> f64 {
        self.inefficiencies[firm]
    }

    /// `1 + a_1 + a_2`, defined for the two-firm model only.
    pub fn gamma(&self) -> Option<f64> {
        match self.inefficiencies[..] {
            [a1, a2] => Some(1.0 + a1 + a2),
            _ => None,
        }
    }

    /// Same firms listed in reverse order.
    pub fn reversed(&self) -> Self {
        let mut inefficiencies = self.inefficiencies.clone();
        inefficiencies.reverse();
        Self { inefficiencies }
    }

    /// True when every firm has the same inefficiency.
    pub fn is_symmetric(&self) -> bool {
        self.inefficiencies.windows(2).all(|w| w[0] == w[1])
    }
}

/// Firm locations in input order, together with the stable sort that
/// places them left to right on the line.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationProfile {
    locations: Vec<f64>,
    /// `order[k]` is the firm at sorted position `k`.
    order: Vec<usize>,
    /// `rank[firm]` is the sorted position of `firm`.
    rank: Vec<usize>,
}

impl LocationProfile {
    pub fn new(locations: Vec<f64>) -> Result<Self, MarketError> {
        for (index, &value) in locations.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(MarketError::LocationOutOfRange { index, value });
            }
        }
        let mut order: Vec<usize> = (0..locations.len()).collect();
        order.sort_by(|&i, &j| locations[i].total_cmp(&locations[j]));
        let mut rank = vec![0; locations.len()];
        for (pos, &firm) in order.iter().enumerate() {
            rank[firm] = pos;
        }
        Ok(Self {
            locations,
            order,
            rank,
        })
    }

    pub fn n(&self) -> usize {
        self.locations.len()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn location(&self, firm: usize) -> f64 {
        self.locations[firm]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn rank(&self, firm: usize) -> usize {
        self.rank[firm]
    }

    pub fn sorted_locations(&self) -> impl Iterator<Item = f64> + '_ {
        self.order.iter().map(move |&firm| self.locations[firm])
    }

    /// The reflected profile `c_i -> 1 - c_i` for every firm.
    pub fn mirrored(&self) -> Self {
        Self::new(self.locations.iter().map(|c| 1.0 - c).collect())
            .expect("reflection keeps locations inside [0, 1]")
    }
}

/// Solved consumer assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketOutcome {
    /// `x_0 = 0, x_1, ..., x_n = 1`, indexed by sorted position.
    cuts: Vec<f64>,
    /// Market share of each firm, in input order.
    shares: Vec<f64>,
    residual: f64,
}

impl MarketOutcome {
    /// Builds an outcome from explicit cuts (sorted positions, `n + 1`
    /// values). The residual is evaluated, not assumed.
    pub fn from_cuts(
        profile: &LocationProfile,
        params: &ModelParams,
        cuts: Vec<f64>,
    ) -> Result<Self, MarketError> {
        check_dims(profile, params)?;
        if cuts.len() != profile.n() + 1 {
            return Err(MarketError::BadCuts {
                expected: profile.n() + 1,
                got: cuts.len(),
            });
        }
        let c: Vec<f64> = profile.sorted_locations().collect();
        let a: Vec<f64> = profile.order().iter().map(|&f| params.a(f)).collect();
        let residual = indifference_residual(&c, &a, &cuts);
        let mut shares = vec![0.0; profile.n()];
        for (pos, &firm) in profile.order().iter().enumerate() {
            shares[firm] = cuts[pos + 1] - cuts[pos];
        }
        Ok(Self {
            cuts,
            shares,
            residual,
        })
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn shares(&self) -> &[f64] {
        &self.shares
    }

    pub fn share(&self, firm: usize) -> f64 {
        self.shares[firm]
    }

    /// Largest absolute violation of the indifference system.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

fn check_dims(profile: &LocationProfile, params: &ModelParams) -> Result<(), MarketError> {
    if profile.n() != params.n() {
        return Err(MarketError::DimensionMismatch {
            locations: profile.n(),
            firms: params.n(),
        });
    }
    Ok(())
}

/// Solves the indifference system for `profile`.
pub fn solve_cuts(
    profile: &LocationProfile,
    params: &ModelParams,
    tol: f64,
) -> Result<MarketOutcome, MarketError> {
    check_dims(profile, params)?;
    let mut solver = CutSolver::default();
    solver.load_sorted(
        profile.sorted_locations(),
        profile.order().iter().map(|&f| params.a(f)),
    );
    let residual = solver.solve(tol)?;
    let cuts = solver.cuts.clone();
    let mut shares = vec![0.0; profile.n()];
    for (pos, &firm) in profile.order().iter().enumerate() {
        shares[firm] = cuts[pos + 1] - cuts[pos];
    }
    Ok(MarketOutcome {
        cuts,
        shares,
        residual,
    })
}

/// Total cost `|c_firm - x| + a_firm * s_firm` of consumer `x` buying from `firm`.
pub fn consumer_cost(
    x: f64,
    firm: usize,
    profile: &LocationProfile,
    outcome: &MarketOutcome,
    params: &ModelParams,
) -> Result<f64, MarketError> {
    check_dims(profile, params)?;
    if firm >= profile.n() {
        return Err(MarketError::FirmOutOfRange {
            index: firm,
            firms: profile.n(),
        });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(MarketError::ConsumerOutOfRange(x));
    }
    Ok((profile.location(firm) - x).abs() + params.a(firm) * outcome.share(firm))
}

/// Largest gain any of `grid_n` evenly spaced consumers could obtain by
/// leaving its assigned firm for the cheapest one. Zero (up to rounding)
/// for a correctly solved outcome.
pub fn check_assignment_stability(
    profile: &LocationProfile,
    outcome: &MarketOutcome,
    params: &ModelParams,
    grid_n: usize,
) -> f64 {
    let grid_n = grid_n.max(2);
    let n = profile.n();
    let cuts = outcome.cuts();
    let cost_at = |pos: usize, x: f64| {
        let firm = profile.order()[pos];
        (profile.location(firm) - x).abs() + params.a(firm) * outcome.share(firm)
    };
    let mut worst = 0.0_f64;
    for j in 0..grid_n {
        let x = j as f64 / (grid_n - 1) as f64;
        let assigned = (0..n).find(|&k| x <= cuts[k + 1]).unwrap_or(n - 1);
        let best = (0..n).map(|k| cost_at(k, x)).fold(f64::INFINITY, f64::min);
        worst = worst.max(cost_at(assigned, x) - best);
    }
    worst
}

/// Max absolute violation of the indifference rows for sorted `c`, `a`.
pub(crate) fn indifference_residual(c: &[f64], a: &[f64], cuts: &[f64]) -> f64 {
    let n = c.len();
    let mut worst = 0.0_f64;
    for i in 1..n {
        let lhs = (c[i - 1] - cuts[i]).abs() + a[i - 1] * (cuts[i] - cuts[i - 1]);
        let rhs = (c[i] - cuts[i]).abs() + a[i] * (cuts[i + 1] - cuts[i]);
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

/// Reusable scratch space for repeated solves. The oracle evaluates
/// millions of profiles, so the hot path avoids allocation.
#[derive(Debug, Clone, Default)]
pub struct CutSolver {
    c: Vec<f64>,
    a: Vec<f64>,
    cuts: Vec<f64>,
    trial: Vec<f64>,
    diag_scratch: Vec<f64>,
    rhs_scratch: Vec<f64>,
    order: Vec<usize>,
}

impl CutSolver {
    pub fn new() -> Self {
        Self::default()
    }

    fn load_sorted(&mut self, c: impl Iterator<Item = f64>, a: impl Iterator<Item = f64>) {
        self.c.clear();
        self.c.extend(c);
        self.a.clear();
        self.a.extend(a);
    }

    /// Drops the warm-start hint, so the next solve depends only on its inputs.
    pub fn reset_hint(&mut self) {
        self.cuts.clear();
    }

    /// Market share of `firm` when the firms sit at `locations`.
    pub fn share_of(
        &mut self,
        firm: usize,
        locations: &[f64],
        params: &ModelParams,
        tol: f64,
    ) -> Result<f64, MarketError> {
        let n = params.n();
        if locations.len() != n {
            return Err(MarketError::DimensionMismatch {
                locations: locations.len(),
                firms: n,
            });
        }
        if firm >= n {
            return Err(MarketError::FirmOutOfRange {
                index: firm,
                firms: n,
            });
        }
        for (index, &value) in locations.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(MarketError::LocationOutOfRange { index, value });
            }
        }
        // Stable insertion sort; n is tiny in every caller that cares.
        self.order.clear();
        self.order.extend(0..n);
        for i in 1..n {
            let mut j = i;
            while j > 0 && locations[self.order[j - 1]] > locations[self.order[j]] {
                self.order.swap(j - 1, j);
                j -= 1;
            }
        }
        self.c.clear();
        self.a.clear();
        let mut pos = 0;
        for (k, &f) in self.order.iter().enumerate() {
            self.c.push(locations[f]);
            self.a.push(params.a(f));
            if f == firm {
                pos = k;
            }
        }
        self.solve(tol)?;
        Ok(self.cuts[pos + 1] - self.cuts[pos])
    }

    /// Solves the system currently loaded in `c`, `a`; leaves cuts in
    /// `self.cuts` and returns the residual.
    fn solve(&mut self, tol: f64) -> Result<f64, MarketError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(MarketError::BadTolerance(tol));
        }
        let n = self.c.len();
        // Warm start: the previous solution's sign pattern usually still
        // holds for a nearby profile, and the solution is unique, so a
        // linear solve that passes the residual check is the answer.
        if self.cuts.len() == n + 1 && self.refine_into_trial() {
            tidy_cuts(&mut self.trial);
            let residual = indifference_residual(&self.c, &self.a, &self.trial);
            if residual <= tol {
                std::mem::swap(&mut self.cuts, &mut self.trial);
                return Ok(residual);
            }
        }
        self.cuts.resize(n + 1, 0.0);
        self.trial.resize(n + 1, 0.0);

        // Bracketing stage: Illinois false position on x_n(x_1) - 1, with
        // a bisection step whenever one side of the bracket stalls.
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut f_lo = shoot(&self.c, &self.a, lo, &mut self.trial);
        let mut f_hi = shoot(&self.c, &self.a, hi, &mut self.trial);
        let mut best_x = if -f_lo < f_hi { lo } else { hi };
        let mut best_f = f_lo.abs().min(f_hi.abs());
        let mut same_side = 0_i32;
        for _ in 0..MAX_SHOOTING_STEPS {
            let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if same_side.abs() >= 3 || !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
                same_side = 0;
            }
            if !(x > lo && x < hi) {
                break;
            }
            let fx = shoot(&self.c, &self.a, x, &mut self.trial);
            if fx.abs() < best_f {
                best_f = fx.abs();
                best_x = x;
            }
            if fx.abs() <= 0.01 * tol {
                break;
            }
            if fx < 0.0 {
                lo = x;
                f_lo = fx;
                if same_side < 0 {
                    f_hi *= 0.5;
                }
                same_side = same_side.min(0) - 1;
            } else {
                hi = x;
                f_hi = fx;
                if same_side > 0 {
                    f_lo *= 0.5;
                }
                same_side = same_side.max(0) + 1;
            }
        }
        shoot(&self.c, &self.a, best_x, &mut self.cuts);
        self.cuts[n] = 1.0;
        tidy_cuts(&mut self.cuts);
        let mut residual = indifference_residual(&self.c, &self.a, &self.cuts);

        // Linear refinement for the sign pattern found above.
        if self.refine_into_trial() {
            tidy_cuts(&mut self.trial);
            let refined = indifference_residual(&self.c, &self.a, &self.trial);
            if refined < residual {
                residual = refined;
                std::mem::swap(&mut self.cuts, &mut self.trial);
            }
        }

        if residual > tol {
            return Err(MarketError::NonConvergence { residual, tol });
        }
        Ok(residual)
    }

    /// Solves the tridiagonal system whose absolute values are resolved
    /// by the signs at the current cuts. Writes into `self.trial`.
    fn refine_into_trial(&mut self) -> bool {
        let n = self.c.len();
        let m = n - 1;
        let (c, a, x) = (&self.c, &self.a, &self.cuts);
        self.diag_scratch.resize(m, 0.0);
        self.rhs_scratch.resize(m, 0.0);
        let (cp, dp) = (&mut self.diag_scratch, &mut self.rhs_scratch);
        // Row r (cut x_{r+1}) couples x_r, x_{r+1}, x_{r+2}.
        for r in 0..m {
            let i = r + 1;
            let sigma = if c[i - 1] >= x[i] { 1.0 } else { -1.0 };
            let tau = if c[i] >= x[i] { 1.0 } else { -1.0 };
            let lower = if r == 0 { 0.0 } else { -a[i - 1] };
            let diag = a[i - 1] + a[i] - sigma + tau;
            let upper = -a[i];
            let mut rhs = tau * c[i] - sigma * c[i - 1];
            if r == m - 1 {
                rhs += a[i];
            }
            let denom = if r == 0 {
                diag
            } else {
                diag - lower * cp[r - 1]
            };
            if denom.abs() < f64::MIN_POSITIVE {
                return false;
            }
            let prev_dp = if r == 0 { 0.0 } else { dp[r - 1] };
            cp[r] = if r == m - 1 { 0.0 } else { upper / denom };
            dp[r] = (rhs - lower * prev_dp) / denom;
        }
        let t = &mut self.trial;
        t[0] = 0.0;
        t[n] = 1.0;
        t[m] = dp[m - 1];
        for r in (0..m - 1).rev() {
            t[r + 1] = dp[r] - cp[r] * t[r + 2];
        }
        t.iter().all(|v| v.is_finite())
    }
}

/// Propagates the indifference rows from a trial `x_1`; returns `x_n - 1`.
fn shoot(c: &[f64], a: &[f64], x1: f64, out: &mut [f64]) -> f64 {
    let n = c.len();
    out[0] = 0.0;
    out[1] = x1;
    for i in 1..n {
        let xi = out[i];
        let step = (c[i - 1] - xi).abs() + a[i - 1] * (xi - out[i - 1]) - (c[i] - xi).abs();
        out[i + 1] = xi + step / a[i];
    }
    out[n] - 1.0
}

/// Clamps cuts into `[0, 1]` and removes any floating-point inversions.
fn tidy_cuts(cuts: &mut [f64]) {
    let n = cuts.len() - 1;
    cuts[0] = 0.0;
    cuts[n] = 1.0;
    for k in 1..n {
        cuts[k] = cuts[k].clamp(cuts[k - 1], 1.0);
    }
}
