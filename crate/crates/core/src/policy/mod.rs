//! Index policies sharing a single select/update cycle.
//!
//! Every policy is driven the same way: the runner shows it the context of
//! the current trial, asks for an arm, and then reports what was observed
//! for that arm. Arms and discrete contexts are 0-based throughout.

mod ccb;
mod dcb;
mod doubling;
mod multi_ucb;
mod ucb1;

pub use ccb::{Ccb, Quantizer};
pub use dcb::{Dcb, DiscreteProblem};
pub use doubling::DoublingCcb;
pub use multi_ucb::MultiUcb;
pub use ucb1::{Ucb1, Ucb1Feedback};

use crate::error::Result;

/// Side information shown before an arm is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Context {
    /// Index into a finite context set.
    Discrete(usize),
    /// Raw value from a continuous context space.
    Continuous(f64),
}

/// What the environment reveals about the pulled arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feedback {
    /// The arm's state `x` (semi-bandit feedback).
    pub value: f64,
    /// The reward `g(y, x)` actually received.
    pub reward: f64,
}

pub trait Policy: Send {
    fn num_arms(&self) -> usize;

    /// Arm to pull for `context`. Never mutates the learning state.
    fn select(&self, context: Context) -> Result<usize>;

    /// Folds the outcome of pulling `arm` under `context` into the state.
    fn update(&mut self, context: Context, arm: usize, feedback: Feedback) -> Result<()>;
}

/// Index of the largest score; the lowest index wins ties.
#[inline]
pub fn argmax(n: usize, score: impl Fn(usize) -> f64) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for j in 0..n {
        let s = score(j);
        if s > best_score {
            best = j;
            best_score = s;
        }
    }
    best
}

/// Incremental mean as written in the update rule: `(mean * m + x) / (m + 1)`.
#[inline]
pub(crate) fn push_mean(mean: f64, count: u64, x: f64) -> f64 {
    let m = count as f64;
    (mean * m + x) / (m + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(3, |_| 1.0), 0);
        assert_eq!(argmax(4, |j| [0.1, 0.5, 0.5, 0.2][j]), 1);
        assert_eq!(argmax(1, |_| f64::NEG_INFINITY), 0);
    }

    #[test]
    fn push_mean_examples() {
        assert!((push_mean(0.5, 4, 1.0) - 0.6).abs() < 1e-15);
        assert_eq!(push_mean(123.0, 0, 2.0), 2.0);
    }
}
