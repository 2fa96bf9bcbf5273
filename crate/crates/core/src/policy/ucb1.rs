use serde::{Deserialize, Serialize};

use super::{argmax, push_mean, Context, Feedback, Policy};
use crate::error::{Error, Result};

/// Which observation a context-blind UCB1 averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ucb1Feedback {
    /// The pulled arm's raw state `x`.
    #[default]
    Value,
    /// The received reward `g(y, x)`.
    Reward,
}

/// UCB1(ε): pulls the arm maximizing `mean_k + sqrt((2 + eps) ln n / m_k)`.
/// `eps = 0` is classical UCB1. Contexts are ignored.
#[derive(Debug, Clone)]
pub struct Ucb1 {
    epsilon: f64,
    means: Vec<f64>,
    pull_counts: Vec<u64>,
    trial: u64,
    feedback: Ucb1Feedback,
}

impl Ucb1 {
    pub fn new(num_arms: usize, epsilon: f64) -> Result<Self> {
        if num_arms == 0 {
            return Err(Error::NoArms);
        }
        if !(epsilon >= 0.0) {
            return Err(Error::NegativeEpsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            means: vec![0.0; num_arms],
            pull_counts: vec![0; num_arms],
            trial: 0,
            feedback: Ucb1Feedback::Value,
        })
    }

    pub fn with_feedback(mut self, feedback: Ucb1Feedback) -> Self {
        self.feedback = feedback;
        self
    }

    pub fn feedback(&self) -> Ucb1Feedback {
        self.feedback
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn pull_counts(&self) -> &[u64] {
        &self.pull_counts
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    pub fn index(&self, arm: usize) -> f64 {
        let n = (self.trial + 1) as f64;
        self.means[arm] + ((2.0 + self.epsilon) * n.ln() / self.pull_counts[arm] as f64).sqrt()
    }

    /// Arm for the upcoming trial. Each arm is tried once first.
    pub fn choose(&self) -> usize {
        let k = self.means.len();
        if self.trial < k as u64 {
            return self.trial as usize;
        }
        let log_term = (2.0 + self.epsilon) * ((self.trial + 1) as f64).ln();
        argmax(k, |j| {
            self.means[j] + (log_term / self.pull_counts[j] as f64).sqrt()
        })
    }

    pub fn observe(&mut self, arm: usize, x: f64) -> Result<()> {
        let k = self.means.len();
        if arm >= k {
            return Err(Error::ArmOutOfRange { arm, num_arms: k });
        }
        self.means[arm] = push_mean(self.means[arm], self.pull_counts[arm], x);
        self.pull_counts[arm] += 1;
        self.trial += 1;
        Ok(())
    }
}

impl Policy for Ucb1 {
    fn num_arms(&self) -> usize {
        self.means.len()
    }

    fn select(&self, _context: Context) -> Result<usize> {
        Ok(self.choose())
    }

    fn update(&mut self, _context: Context, arm: usize, feedback: Feedback) -> Result<()> {
        let x = match self.feedback {
            Ucb1Feedback::Value => feedback.value,
            Ucb1Feedback::Reward => feedback.reward,
        };
        self.observe(arm, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_state(means: &[f64], pulls: &[u64], trial: u64) -> Ucb1 {
        let mut u = Ucb1::new(means.len(), 0.0).unwrap();
        u.means.copy_from_slice(means);
        u.pull_counts.copy_from_slice(pulls);
        u.trial = trial;
        u
    }

    #[test]
    fn single_arm_always_chosen() {
        let mut u = Ucb1::new(1, 0.0).unwrap();
        for t in 0..50 {
            assert_eq!(u.choose(), 0);
            u.observe(0, (t % 2) as f64).unwrap();
        }
    }

    #[test]
    fn equal_pulls_compare_means() {
        let u = with_state(&[0.9, 0.1], &[50, 50], 99);
        assert_eq!(u.choose(), 0);
    }

    #[test]
    fn bonus_dominates_for_rarely_pulled_arm() {
        let u = with_state(&[0.9, 0.1], &[99, 1], 99);
        // sqrt(2 ln 100 / 1) ~ 3.03
        let bonus = (2.0 * 100f64.ln()).sqrt();
        assert!((bonus - 3.035).abs() < 1e-3);
        assert!((u.index(1) - (0.1 + bonus)).abs() < 1e-12);
        assert_eq!(u.choose(), 1);
    }

    #[test]
    fn feedback_mode_selects_observation() {
        let fb = Feedback {
            value: 3.0,
            reward: 1.0,
        };
        let mut by_value = Ucb1::new(1, 0.0).unwrap();
        by_value.update(Context::Discrete(0), 0, fb).unwrap();
        assert_eq!(by_value.means(), &[3.0]);
        let mut by_reward = Ucb1::new(1, 0.0)
            .unwrap()
            .with_feedback(Ucb1Feedback::Reward);
        by_reward.update(Context::Discrete(0), 0, fb).unwrap();
        assert_eq!(by_reward.means(), &[1.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Ucb1::new(0, 0.0).is_err());
        assert!(Ucb1::new(2, -0.1).is_err());
        let mut u = Ucb1::new(2, 0.0).unwrap();
        assert!(u.observe(2, 1.0).is_err());
    }
}
