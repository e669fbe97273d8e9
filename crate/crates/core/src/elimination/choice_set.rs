//! Finite unions of closed intervals in `[0, 1]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Intervals closer than this are merged; endpoints this far outside
/// `[0, 1]` are clamped rather than rejected.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("interval [{lo}, {hi}] is not a valid subset of [0, 1]")]
    BadInterval { lo: f64, hi: f64 },
}

/// Closed interval `[lo, hi]`; a point when `lo == hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Interval { lo, hi }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Sorted, disjoint, nonadjacent intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct ChoiceSet {
    intervals: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for ChoiceSet {
    type Error = SetError;
    fn try_from(v: Vec<Interval>) -> Result<Self, SetError> {
        ChoiceSet::new(v)
    }
}

impl From<ChoiceSet> for Vec<Interval> {
    fn from(s: ChoiceSet) -> Self {
        s.intervals
    }
}

impl ChoiceSet {
    /// Validates, sorts and merges the given intervals.
    pub fn new(intervals: Vec<Interval>) -> Result<Self, SetError> {
        let mut clean = Vec::with_capacity(intervals.len());
        for Interval { lo, hi } in intervals {
            let ok = lo.is_finite()
                && hi.is_finite()
                && lo <= hi
                && lo >= -MERGE_TOL
                && hi <= 1.0 + MERGE_TOL;
            if !ok {
                return Err(SetError::BadInterval { lo, hi });
            }
            clean.push(Interval {
                lo: lo.clamp(0.0, 1.0),
                hi: hi.clamp(0.0, 1.0),
            });
        }
        Ok(Self::normalized(clean))
    }

    fn normalized(mut v: Vec<Interval>) -> Self {
        v.sort_by(|x, y| x.lo.total_cmp(&y.lo).then(x.hi.total_cmp(&y.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for i in v {
            match out.last_mut() {
                Some(last) if i.lo <= last.hi + MERGE_TOL => last.hi = last.hi.max(i.hi),
                _ => out.push(i),
            }
        }
        ChoiceSet { intervals: out }
    }

    pub fn empty() -> Self {
        ChoiceSet {
            intervals: Vec::new(),
        }
    }

    pub fn full() -> Self {
        ChoiceSet {
            intervals: vec![Interval { lo: 0.0, hi: 1.0 }],
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self, SetError> {
        Self::new(vec![Interval { lo, hi }])
    }

    pub fn point(x: f64) -> Result<Self, SetError> {
        Self::interval(x, x)
    }

    pub fn points(xs: &[f64]) -> Result<Self, SetError> {
        Self::new(xs.iter().map(|&x| Interval { lo: x, hi: x }).collect())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.intervals.first().map(|i| i.lo)
    }

    pub fn max(&self) -> Option<f64> {
        self.intervals.last().map(|i| i.hi)
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::width).sum()
    }

    pub fn max_width(&self) -> f64 {
        self.intervals
            .iter()
            .map(Interval::width)
            .fold(0.0, f64::max)
    }

    pub fn contains_point(&self, x: f64, tol: f64) -> bool {
        self.intervals
            .iter()
            .any(|i| x >= i.lo - tol && x <= i.hi + tol)
    }

    /// `other ⊆ self`, allowing endpoints to overshoot by `tol`.
    pub fn contains(&self, other: &ChoiceSet, tol: f64) -> bool {
        other.intervals.iter().all(|o| {
            self.intervals
                .iter()
                .any(|s| o.lo >= s.lo - tol && o.hi <= s.hi + tol)
        })
    }

    pub fn union(&self, other: &ChoiceSet) -> ChoiceSet {
        let mut v = self.intervals.clone();
        v.extend_from_slice(&other.intervals);
        Self::normalized(v)
    }

    pub fn intersect(&self, other: &ChoiceSet) -> ChoiceSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (x, y) = (self.intervals[i], other.intervals[j]);
            let lo = x.lo.max(y.lo);
            let hi = x.hi.min(y.hi);
            if lo <= hi {
                out.push(Interval { lo, hi });
            }
            if x.hi < y.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::normalized(out)
    }

    /// Reflection `x -> 1 - x`.
    pub fn mirror(&self) -> ChoiceSet {
        ChoiceSet {
            intervals: self
                .intervals
                .iter()
                .rev()
                .map(|i| Interval {
                    lo: 1.0 - i.hi,
                    hi: 1.0 - i.lo,
                })
                .collect(),
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let m = self.mirror();
        m.len() == self.len()
            && m.intervals
                .iter()
                .zip(&self.intervals)
                .all(|(x, y)| (x.lo - y.lo).abs() <= tol && (x.hi - y.hi).abs() <= tol)
    }

    /// Replaces every interval of width at most `tol` by its midpoint.
    pub fn collapse(&self, tol: f64) -> ChoiceSet {
        let v = self
            .intervals
            .iter()
            .map(|i| {
                if i.width() <= tol {
                    let m = 0.5 * (i.lo + i.hi);
                    Interval { lo: m, hi: m }
                } else {
                    *i
                }
            })
            .collect();
        Self::normalized(v)
    }

    /// `sup_{x in self} d(x, other)`.
    fn directed(&self, other: &ChoiceSet) -> f64 {
        let dist = |x: f64| {
            other
                .intervals
                .iter()
                .map(|j| (j.lo - x).max(x - j.hi).max(0.0))
                .fold(f64::INFINITY, f64::min)
        };
        let mut worst = 0.0_f64;
        for i in &self.intervals {
            worst = worst.max(dist(i.lo)).max(dist(i.hi));
            // Inside an interval the distance peaks at the middle of a gap of `other`.
            for w in other.intervals.windows(2) {
                let mid = 0.5 * (w[0].hi + w[1].lo);
                if mid > i.lo && mid < i.hi {
                    worst = worst.max(dist(mid));
                }
            }
        }
        worst
    }

    /// Hausdorff distance; infinite when exactly one side is empty.
    pub fn hausdorff(&self, other: &ChoiceSet) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => 0.0,
            (true, false) | (false, true) => f64::INFINITY,
            _ => self.directed(other).max(other.directed(self)),
        }
    }
}

impl std::fmt::Display for ChoiceSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        for (k, i) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, " U ")?;
            }
            if i.is_point() {
                write!(f, "{{{}}}", i.lo)?;
            } else {
                write!(f, "[{}, {}]", i.lo, i.hi)?;
            }
        }
        Ok(())
    }
}
