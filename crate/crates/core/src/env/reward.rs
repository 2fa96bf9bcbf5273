use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of successfully transmitted bits when `y` bits are offered to a
/// channel of capacity `x`.
#[inline]
pub fn reward_min(y: f64, x: f64) -> f64 {
    y.min(x)
}

/// Power-rate function `ln(1 + p x)` for transmit power `p` and channel
/// gain-to-noise ratio `x`.
#[inline]
pub fn reward_log(p: f64, x: f64) -> f64 {
    (p * x).ln_1p()
}

/// Known reward function `g(y, x)` mapping a context and an arm state to a
/// payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RewardFn {
    /// `min(y, x)`.
    MinCapacity,
    /// `ln(1 + y x)`, with the context playing the role of transmit power.
    LogPower,
    /// `x`: the context carries no information about the reward.
    Identity,
    /// Explicit lookup table over a finite grid. `rewards[a][b]` is the
    /// reward for context `contexts[a]` and arm state `values[b]`.
    CustomTable {
        contexts: Vec<f64>,
        values: Vec<f64>,
        rewards: Vec<Vec<f64>>,
    },
}

fn position(grid: &[f64], v: f64) -> Option<usize> {
    grid.iter()
        .position(|&g| (g - v).abs() <= 1e-12 * g.abs().max(1.0))
}

impl RewardFn {
    /// Evaluates `g(y, x)`. A custom table yields NaN for pairs outside its
    /// grid; [`RewardFn::validate`] rejects such configurations up front.
    #[inline]
    pub fn eval(&self, y: f64, x: f64) -> f64 {
        match self {
            RewardFn::MinCapacity => reward_min(y, x),
            RewardFn::LogPower => reward_log(y, x),
            RewardFn::Identity => x,
            RewardFn::CustomTable {
                contexts,
                values,
                rewards,
            } => match (position(contexts, y), position(values, x)) {
                (Some(a), Some(b)) => rewards[a][b],
                _ => f64::NAN,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let RewardFn::CustomTable {
            contexts,
            values,
            rewards,
        } = self
        {
            if rewards.len() != contexts.len() || rewards.iter().any(|r| r.len() != values.len()) {
                return Err(Error::InvalidReward(format!(
                    "table must be {}x{}",
                    contexts.len(),
                    values.len()
                )));
            }
            if rewards.iter().flatten().any(|r| !r.is_finite()) {
                return Err(Error::InvalidReward("table entries must be finite".into()));
            }
        }
        Ok(())
    }

    /// Checks that a custom table covers every (context, arm state) pair.
    pub(crate) fn covers(&self, contexts: &[f64], values: &[f64]) -> Result<()> {
        if let RewardFn::CustomTable { .. } = self {
            for &y in contexts {
                for &x in values {
                    if self.eval(y, x).is_nan() {
                        return Err(Error::InvalidReward(format!(
                            "table has no entry for (y = {y}, x = {x})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Reward function together with its declared bound `|g| <= bound` and, for
/// continuous contexts, a Lipschitz constant in the context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardSpec {
    #[serde(flatten)]
    pub function: RewardFn,
    pub bound: f64,
    #[serde(default)]
    pub lipschitz: Option<f64>,
}

impl RewardSpec {
    pub fn new(function: RewardFn, bound: f64, lipschitz: Option<f64>) -> Self {
        Self {
            function,
            bound,
            lipschitz,
        }
    }

    #[inline]
    pub fn eval(&self, y: f64, x: f64) -> f64 {
        self.function.eval(y, x)
    }
}
