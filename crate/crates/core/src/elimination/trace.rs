//! Round-by-round record of an elimination run.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::choice_set::ChoiceSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationTrace {
    /// `rounds[k][i]` is firm `i`'s surviving set after `k` rounds; `rounds[0]` is `[0, 1]`.
    pub rounds: Vec<Vec<ChoiceSet>>,
    /// Per-firm limit, with intervals no wider than the tolerance collapsed to points.
    pub limit: Vec<ChoiceSet>,
    /// First round whose gap to its predecessor fell to the tolerance.
    pub converged_at: Option<usize>,
    /// `hausdorff_gaps[k]` is the largest per-firm distance between rounds `k` and `k + 1`.
    pub hausdorff_gaps: Vec<f64>,
    /// Inefficiencies in the caller's firm order.
    pub inefficiencies: Vec<f64>,
}

impl EliminationTrace {
    pub(crate) fn start(inefficiencies: Vec<f64>) -> Self {
        let n = inefficiencies.len();
        EliminationTrace {
            rounds: vec![vec![ChoiceSet::full(); n]],
            limit: Vec::new(),
            converged_at: None,
            hausdorff_gaps: Vec::new(),
            inefficiencies,
        }
    }

    /// Appends a round and returns its gap to the previous one.
    pub(crate) fn push(&mut self, sets: Vec<ChoiceSet>) -> f64 {
        let prev = self.rounds.last().expect("trace starts with round 0");
        let gap = prev
            .iter()
            .zip(&sets)
            .map(|(p, q)| p.hausdorff(q))
            .fold(0.0, f64::max);
        self.rounds.push(sets);
        self.hausdorff_gaps.push(gap);
        gap
    }

    pub(crate) fn finish(&mut self, tol: f64) {
        self.limit = self
            .rounds
            .last()
            .map(|r| r.iter().map(|s| s.collapse(tol)).collect())
            .unwrap_or_default();
    }

    pub fn converged(&self) -> bool {
        self.converged_at.is_some()
    }

    pub fn n_firms(&self) -> usize {
        self.inefficiencies.len()
    }

    /// Rounds computed, not counting round 0.
    pub fn n_rounds(&self) -> usize {
        self.rounds.len().saturating_sub(1)
    }

    pub fn last_round(&self) -> &[ChoiceSet] {
        self.rounds.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every round contained in its predecessor, within `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.rounds
            .windows(2)
            .all(|w| w[0].iter().zip(&w[1]).all(|(p, q)| p.contains(q, tol)))
    }

    /// The limit lies in every round, within `tol`.
    pub fn limit_is_nested(&self, tol: f64) -> bool {
        self.rounds
            .iter()
            .all(|r| r.iter().zip(&self.limit).all(|(p, l)| p.contains(l, tol)))
    }

    pub(crate) fn swap_firms(&mut self, i: usize, j: usize) {
        for r in &mut self.rounds {
            r.swap(i, j);
        }
        if self.limit.len() > i.max(j) {
            self.limit.swap(i, j);
        }
        self.inefficiencies.swap(i, j);
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// One row per interval: `round,firm,piece,lo,hi`; the limit uses round `limit`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["round", "firm", "piece", "lo", "hi"])?;
        let labelled = self
            .rounds
            .iter()
            .enumerate()
            .map(|(k, r)| (k.to_string(), r))
            .chain(std::iter::once(("limit".to_string(), &self.limit)));
        for (label, sets) in labelled {
            for (firm, set) in sets.iter().enumerate() {
                for (piece, i) in set.intervals().iter().enumerate() {
                    w.write_record([
                        label.clone(),
                        (firm + 1).to_string(),
                        piece.to_string(),
                        fmt_sig(i.lo),
                        fmt_sig(i.hi),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Shortest decimal form of `x` rounded to 15 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.14e}")
        .parse()
        .expect("scientific literal parses");
    format!("{rounded}")
}
