use super::{argmax, push_mean, Context, Feedback, Policy};
use crate::env::RewardFn;
use crate::error::{Error, Result};

/// What a discrete-context policy needs to know about the problem: the
/// context values, the set of possible arm states, the reward function and
/// the number of arms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProblem {
    pub contexts: Vec<f64>,
    pub arm_support: Vec<f64>,
    pub reward: RewardFn,
    pub num_arms: usize,
}

impl DiscreteProblem {
    pub fn new(
        contexts: Vec<f64>,
        arm_support: Vec<f64>,
        reward: RewardFn,
        num_arms: usize,
    ) -> Self {
        Self {
            contexts,
            arm_support,
            reward,
            num_arms,
        }
    }

    /// `G_i = sup_x g(y_i, x) - inf_x g(y_i, x)` over the arm support.
    pub fn reward_ranges(&self) -> Vec<f64> {
        self.contexts
            .iter()
            .map(|&y| crate::env::reward_range(&self.arm_support, |x| self.reward.eval(y, x)))
            .collect()
    }
}

/// Discrete contextual bandit policy DCB(ε).
///
/// Keeps one reward estimate per (context, arm) pair but a single pull
/// counter per arm: since the reward function is known, the state revealed
/// by one pull updates the estimate for every context at once. The index
/// for arm `j` under context `i` at trial `n` is
///
/// ```text
/// theta_hat[i][j] + G_i * sqrt((2 + eps) ln n / m_j)
/// ```
///
/// and the first `K` trials pull arms `0..K` in order.
#[derive(Debug, Clone)]
pub struct Dcb {
    epsilon: f64,
    num_arms: usize,
    contexts: Vec<f64>,
    reward: RewardFn,
    /// Arm-major: `theta_hat[j * M + i]`.
    theta_hat: Vec<f64>,
    pull_counts: Vec<u64>,
    trial: u64,
    reward_ranges: Vec<f64>,
    support: Vec<f64>,
    /// State-major: `reward_table[s * M + i] = g(y_i, support[s])`.
    reward_table: Vec<f64>,
    scratch: Vec<f64>,
}

impl Dcb {
    pub fn new(problem: &DiscreteProblem, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        Self::with_epsilon(problem, epsilon)
    }

    /// Same as [`Dcb::new`] but admits `epsilon == 0`, for which the
    /// bounded-regret guarantee on optimal arms is not known to hold.
    pub fn new_unchecked_epsilon(problem: &DiscreteProblem, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::NegativeEpsilon(epsilon));
        }
        Self::with_epsilon(problem, epsilon)
    }

    fn with_epsilon(problem: &DiscreteProblem, epsilon: f64) -> Result<Self> {
        if problem.num_arms == 0 {
            return Err(Error::NoArms);
        }
        if problem.contexts.is_empty() {
            return Err(Error::NoContexts);
        }
        let m = problem.contexts.len();
        let k = problem.num_arms;
        let support = problem.arm_support.clone();
        let mut reward_table = Vec::with_capacity(support.len() * m);
        for &x in &support {
            reward_table.extend(problem.contexts.iter().map(|&y| problem.reward.eval(y, x)));
        }
        Ok(Self {
            epsilon,
            num_arms: k,
            contexts: problem.contexts.clone(),
            reward: problem.reward.clone(),
            theta_hat: vec![0.0; m * k],
            pull_counts: vec![0; k],
            trial: 0,
            reward_ranges: problem.reward_ranges(),
            support,
            reward_table,
            scratch: vec![0.0; m],
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn num_contexts(&self) -> usize {
        self.contexts.len()
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    pub fn pull_counts(&self) -> &[u64] {
        &self.pull_counts
    }

    pub fn reward_ranges(&self) -> &[f64] {
        &self.reward_ranges
    }

    pub fn theta_hat(&self, context: usize, arm: usize) -> f64 {
        self.theta_hat[arm * self.contexts.len() + context]
    }

    pub fn is_initialized(&self) -> bool {
        self.trial >= self.num_arms as u64
    }

    /// Index of `arm` under `context` at the upcoming trial.
    pub fn index(&self, context: usize, arm: usize) -> f64 {
        let n = (self.trial + 1) as f64;
        let log_term = (2.0 + self.epsilon) * n.ln();
        self.theta_hat(context, arm)
            + self.reward_ranges[context] * (log_term / self.pull_counts[arm] as f64).sqrt()
    }

    pub fn select_index(&self, context: usize) -> Result<usize> {
        let m = self.contexts.len();
        if context >= m {
            return Err(Error::ContextOutOfRange {
                index: context,
                num_contexts: m,
            });
        }
        if !self.is_initialized() {
            return Ok(self.trial as usize);
        }
        let n = (self.trial + 1) as f64;
        let log_term = (2.0 + self.epsilon) * n.ln();
        let range = self.reward_ranges[context];
        Ok(argmax(self.num_arms, |j| {
            self.theta_hat[j * m + context] + range * (log_term / self.pull_counts[j] as f64).sqrt()
        }))
    }

    /// Records the state `value` observed on `arm`: every context's estimate
    /// for that arm moves, the pull counter of that arm and the trial
    /// counter advance by one.
    pub fn update_value(&mut self, arm: usize, value: f64) -> Result<()> {
        if arm >= self.num_arms {
            return Err(Error::ArmOutOfRange {
                arm,
                num_arms: self.num_arms,
            });
        }
        let m = self.contexts.len();
        let count = self.pull_counts[arm];
        let rewards: &[f64] = match self.support.iter().position(|&s| s == value) {
            Some(s) => &self.reward_table[s * m..(s + 1) * m],
            None => {
                for (slot, &y) in self.scratch.iter_mut().zip(&self.contexts) {
                    *slot = self.reward.eval(y, value);
                }
                &self.scratch
            }
        };
        let column = &mut self.theta_hat[arm * m..(arm + 1) * m];
        for (theta, &g) in column.iter_mut().zip(rewards) {
            *theta = push_mean(*theta, count, g);
        }
        self.pull_counts[arm] += 1;
        self.trial += 1;
        Ok(())
    }
}

impl Policy for Dcb {
    fn num_arms(&self) -> usize {
        self.num_arms
    }

    fn select(&self, context: Context) -> Result<usize> {
        match context {
            Context::Discrete(i) => self.select_index(i),
            Context::Continuous(_) => Err(Error::ContextKind {
                expected: "discrete",
            }),
        }
    }

    fn update(&mut self, context: Context, arm: usize, feedback: Feedback) -> Result<()> {
        if let Context::Discrete(i) = context {
            if i >= self.contexts.len() {
                return Err(Error::ContextOutOfRange {
                    index: i,
                    num_contexts: self.contexts.len(),
                });
            }
        }
        self.update_value(arm, feedback.value)
    }
}
