//! Execution backend for the data-parallel sweeps.
//!
//! `Parallel` runs on the rayon pool when the `parallel` feature is on and
//! quietly degrades to `Sequential` otherwise. Both produce identical output:
//! work is split into index ranges and results are combined in index order.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this build can actually run in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Maps `f` over `0..len` with per-worker scratch state from `init`,
    /// returning results in index order.
    pub fn map_indexed<S, T, I, F>(self, len: usize, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..len)
                    .into_par_iter()
                    .map_init(&init, |s, i| f(s, i))
                    .collect()
            }
            _ => {
                let mut state = init();
                (0..len).map(|i| f(&mut state, i)).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backends_agree() {
        let seq = Exec::Sequential.map_indexed(
            1000,
            || 0u64,
            |s, i| {
                *s += 1;
                (i as f64).sqrt()
            },
        );
        let par = Exec::Parallel.map_indexed(1000, || 0u64, |_, i| (i as f64).sqrt());
        assert_eq!(seq, par);
    }
}
