//! Stochastic environments: context laws, arm laws, the known reward
//! function, and the distribution-aware genie used to score policies.

mod genie;
mod presets;
mod reward;
mod spec;

pub(crate) use genie::reward_range;
pub use genie::{genie_arm_continuous, optimal_set_continuous, GenieTables};
pub use presets::{preset, PRESET_NAMES};
pub use reward::{reward_log, reward_min, RewardFn, RewardSpec};
pub use spec::{ArmSpec, ContextSpec};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{Context, DiscreteProblem};

/// One draw from the environment: the context and every arm's state.
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub context: Context,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub contexts: ContextSpec,
    pub arms: Vec<ArmSpec>,
    pub reward: RewardSpec,
}

impl Environment {
    pub fn new(contexts: ContextSpec, arms: Vec<ArmSpec>, reward: RewardSpec) -> Result<Self> {
        let env = Self {
            contexts,
            arms,
            reward,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms.is_empty() {
            return Err(Error::NoArms);
        }
        self.contexts.validate()?;
        for arm in &self.arms {
            arm.validate()?;
        }
        self.reward.function.validate()?;
        if !(self.reward.bound > 0.0) {
            return Err(Error::InvalidReward(format!(
                "bound must be positive, got {}",
                self.reward.bound
            )));
        }
        let support = self.arm_support();
        let probe: Vec<f64> = match &self.contexts {
            ContextSpec::Discrete { values, .. } => values.clone(),
            ContextSpec::Uniform { lo, hi } => vec![*lo, 0.5 * (lo + hi), *hi],
        };
        if self.contexts.is_discrete() {
            self.reward.function.covers(&probe, &support)?;
        } else if matches!(self.reward.function, RewardFn::CustomTable { .. }) {
            return Err(Error::InvalidReward(
                "a lookup table needs a discrete context set".into(),
            ));
        }
        let limit = self.reward.bound * (1.0 + 1e-12);
        for &y in &probe {
            for &x in &support {
                let g = self.reward.eval(y, x);
                if !(g.abs() <= limit) {
                    return Err(Error::InvalidReward(format!(
                        "|g({y}, {x})| = {} exceeds bound {}",
                        g.abs(),
                        self.reward.bound
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    /// `Some(M)` for a discrete context set.
    pub fn num_contexts(&self) -> Option<usize> {
        match &self.contexts {
            ContextSpec::Discrete { values, .. } => Some(values.len()),
            ContextSpec::Uniform { .. } => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.contexts.is_discrete()
    }

    /// The numeric context `y` behind an observation.
    #[inline]
    pub fn context_value(&self, context: Context) -> f64 {
        match (context, &self.contexts) {
            (Context::Discrete(i), ContextSpec::Discrete { values, .. }) => values[i],
            (Context::Continuous(y), _) => y,
            (Context::Discrete(i), ContextSpec::Uniform { .. }) => i as f64,
        }
    }

    /// Smallest interval containing every context value.
    pub fn context_support(&self) -> (f64, f64) {
        match &self.contexts {
            ContextSpec::Discrete { values, .. } => values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                }),
            ContextSpec::Uniform { lo, hi } => (*lo, *hi),
        }
    }

    /// Sorted union of every arm's support.
    pub fn arm_support(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .arms
            .iter()
            .flat_map(|a| a.outcomes().into_iter().map(|(v, _)| v))
            .collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        values
    }

    /// Description consumed by the discrete-context policies.
    pub fn discrete_problem(&self) -> Result<DiscreteProblem> {
        match &self.contexts {
            ContextSpec::Discrete { values, .. } => Ok(DiscreteProblem::new(
                values.clone(),
                self.arm_support(),
                self.reward.function.clone(),
                self.num_arms(),
            )),
            ContextSpec::Uniform { .. } => Err(Error::NeedsDiscrete("a discrete problem")),
        }
    }

    /// Draws the context and then each arm's state, in arm order, writing
    /// the states into `values`.
    #[inline]
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, values: &mut [f64]) -> Context {
        let context = self.contexts.sample(rng);
        for (slot, arm) in values.iter_mut().zip(&self.arms) {
            *slot = arm.sample(rng);
        }
        context
    }

    pub fn sample_round<R: Rng + ?Sized>(&self, rng: &mut R) -> Round {
        let mut values = vec![0.0; self.num_arms()];
        let context = self.sample_into(rng, &mut values);
        Round { context, values }
    }

    /// Exact expected reward `E[g(y, X_arm)]`.
    #[inline]
    pub fn expected_reward(&self, y: f64, arm: usize) -> f64 {
        self.arms[arm].expect(|x| self.reward.eval(y, x))
    }

    pub fn genie(&self) -> Result<GenieTables> {
        GenieTables::compute(&self.contexts, &self.arms, &self.reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_stream_replays_with_same_seed() {
        let env = preset("channel-k7").unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..100)
                .map(|_| env.sample_round(&mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn rewards_stay_within_bound() {
        for name in PRESET_NAMES {
            let env = preset(name).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for _ in 0..10_000 {
                let round = env.sample_round(&mut rng);
                let y = env.context_value(round.context);
                for &x in &round.values {
                    assert!(env.reward.eval(y, x).abs() <= env.reward.bound + 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_understated_bound() {
        let mut env = preset("channel-k4").unwrap();
        env.reward.bound = 3.0;
        assert!(env.validate().is_err());
    }

    #[test]
    fn arm_support_is_union() {
        let env = preset("channel-k7").unwrap();
        assert_eq!(
            env.arm_support(),
            vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]
        );
    }

    #[test]
    fn log_power_lipschitz_audit() {
        let env = preset("energy-harvesting-k4").unwrap();
        let l = env.reward.lipschitz.unwrap();
        let x_max = *env.arm_support().last().unwrap();
        assert_eq!(l, x_max);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let p: f64 = rng.random();
            let q: f64 = rng.random();
            if (p - q).abs() < 1e-9 {
                continue;
            }
            for &x in &env.arm_support() {
                let ratio = (reward_log(p, x) - reward_log(q, x)).abs() / (p - q).abs();
                assert!(ratio <= l + 1e-9);
            }
        }
    }
}
