use serde::Serialize;

use super::{ArmSpec, ContextSpec, RewardSpec};
use crate::error::{Error, Result};
use crate::policy::argmax;

/// Everything a distribution-aware genie knows about a discrete-context
/// problem. Arm and context indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenieTables {
    /// `theta[i][j] = E[g(y_i, X_j)]`.
    pub theta: Vec<Vec<f64>>,
    /// Optimal arm per context, lowest index on ties.
    pub h_star: Vec<usize>,
    /// `gaps[i][j] = theta[i][h_star[i]] - theta[i][j]`.
    pub gaps: Vec<Vec<f64>>,
    /// Arms optimal for at least one context, ascending.
    pub optimal_set: Vec<usize>,
    /// Arms optimal for no context, ascending.
    pub non_optimal_set: Vec<usize>,
    /// Smallest gap over all pairs with `h_star[i] != j`; `None` with one arm.
    pub delta_o: Option<f64>,
    pub delta_max: f64,
    pub context_probs: Vec<f64>,
    /// Smallest context probability.
    pub p_o: f64,
    /// Total probability of the contexts each arm is optimal for.
    pub q: Vec<f64>,
    /// `sup_x g(y_i, x) - inf_x g(y_i, x)` over the union of arm supports.
    pub reward_ranges: Vec<f64>,
}

impl GenieTables {
    pub fn compute(contexts: &ContextSpec, arms: &[ArmSpec], reward: &RewardSpec) -> Result<Self> {
        let (values, probs) = match contexts {
            ContextSpec::Discrete { values, probs } => (values, probs),
            ContextSpec::Uniform { .. } => return Err(Error::NeedsDiscrete("the genie table")),
        };
        if arms.is_empty() {
            return Err(Error::NoArms);
        }
        contexts.validate()?;
        for arm in arms {
            arm.validate()?;
        }
        let k = arms.len();

        let theta: Vec<Vec<f64>> = values
            .iter()
            .map(|&y| {
                arms.iter()
                    .map(|a| a.expect(|x| reward.eval(y, x)))
                    .collect()
            })
            .collect();
        let h_star: Vec<usize> = theta
            .iter()
            .map(|row| argmax(row.len(), |j| row[j]))
            .collect();
        let gaps: Vec<Vec<f64>> = theta
            .iter()
            .zip(&h_star)
            .map(|(row, &h)| row.iter().map(|&t| row[h] - t).collect())
            .collect();

        let mut q = vec![0.0; k];
        for (&h, &p) in h_star.iter().zip(probs) {
            q[h] += p;
        }
        let optimal_set: Vec<usize> = (0..k).filter(|j| h_star.contains(j)).collect();
        let non_optimal_set: Vec<usize> = (0..k).filter(|j| !h_star.contains(j)).collect();

        let mut delta_o: Option<f64> = None;
        let mut delta_max = 0.0f64;
        for (row, &h) in gaps.iter().zip(&h_star) {
            for (j, &d) in row.iter().enumerate() {
                delta_max = delta_max.max(d);
                if j != h {
                    delta_o = Some(delta_o.map_or(d, |cur| cur.min(d)));
                }
            }
        }

        let mut support: Vec<f64> = arms
            .iter()
            .flat_map(|a| a.outcomes().into_iter().map(|(v, _)| v))
            .collect();
        support.sort_by(f64::total_cmp);
        support.dedup();
        let reward_ranges = values
            .iter()
            .map(|&y| reward_range(&support, |x| reward.eval(y, x)))
            .collect();

        Ok(Self {
            theta,
            h_star,
            gaps,
            optimal_set,
            non_optimal_set,
            delta_o,
            delta_max,
            context_probs: probs.clone(),
            p_o: probs.iter().copied().fold(f64::INFINITY, f64::min),
            q,
            reward_ranges,
        })
    }

    pub fn num_arms(&self) -> usize {
        self.q.len()
    }

    pub fn num_contexts(&self) -> usize {
        self.theta.len()
    }

    /// `min_i gaps[i][arm]`.
    pub fn min_gap(&self, arm: usize) -> f64 {
        self.gaps
            .iter()
            .map(|row| row[arm])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn optimal_reward(&self, context: usize) -> f64 {
        self.theta[context][self.h_star[context]]
    }
}

pub(crate) fn reward_range(support: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let (lo, hi) = support
        .iter()
        .map(|&x| g(x))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if support.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Optimal arm and its expected reward at a single context value, by exact
/// summation over each arm's support.
pub fn genie_arm_continuous(y: f64, arms: &[ArmSpec], reward: &RewardSpec) -> (usize, f64) {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (j, arm) in arms.iter().enumerate() {
        let v = arm.expect(|x| reward.eval(y, x));
        if v > best_value {
            best = j;
            best_value = v;
        }
    }
    (best, best_value)
}

/// Arms that are optimal somewhere in `[lo, hi]`, scanned at the midpoints
/// of `cells` equal cells.
pub fn optimal_set_continuous(
    (lo, hi): (f64, f64),
    cells: usize,
    arms: &[ArmSpec],
    reward: &RewardSpec,
) -> Vec<usize> {
    let width = (hi - lo) / cells as f64;
    let mut set: Vec<usize> = (0..cells)
        .map(|c| genie_arm_continuous(lo + (c as f64 + 0.5) * width, arms, reward).0)
        .collect();
    set.sort_unstable();
    set.dedup();
    set
}
