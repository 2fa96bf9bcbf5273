use super::{argmax, push_mean, Context, Feedback, Policy, Quantizer};
use crate::error::{Error, Result};

/// One independent UCB1 instance per context. Context `i` uses
/// `mean[i][k] + sqrt(2 ln n_i / m[i][k])`, where `n_i` counts the
/// occurrences of `i` including the current one. With a quantizer the
/// instances run over bins of a continuous context.
#[derive(Debug, Clone)]
pub struct MultiUcb {
    num_arms: usize,
    num_contexts: usize,
    /// Row-major `M x K`.
    reward_means: Vec<f64>,
    per_context_pulls: Vec<u64>,
    context_counts: Vec<u64>,
    bonus_scale: Option<Vec<f64>>,
    quantizer: Option<Quantizer>,
}

impl MultiUcb {
    pub fn new(num_contexts: usize, num_arms: usize) -> Result<Self> {
        if num_arms == 0 {
            return Err(Error::NoArms);
        }
        if num_contexts == 0 {
            return Err(Error::NoContexts);
        }
        Ok(Self {
            num_arms,
            num_contexts,
            reward_means: vec![0.0; num_contexts * num_arms],
            per_context_pulls: vec![0; num_contexts * num_arms],
            context_counts: vec![0; num_contexts],
            bonus_scale: None,
            quantizer: None,
        })
    }

    /// Instances over the bins of `quantizer`.
    pub fn quantized(quantizer: Quantizer, num_arms: usize) -> Result<Self> {
        let mut s = Self::new(quantizer.num_bins(), num_arms)?;
        s.quantizer = Some(quantizer);
        Ok(s)
    }

    /// Scales context `i`'s confidence term by `ranges[i]`.
    pub fn with_scaled_bonus(mut self, ranges: Vec<f64>) -> Result<Self> {
        if ranges.len() != self.num_contexts {
            return Err(Error::ContextOutOfRange {
                index: ranges.len(),
                num_contexts: self.num_contexts,
            });
        }
        self.bonus_scale = Some(ranges);
        Ok(self)
    }

    pub fn quantizer(&self) -> Option<&Quantizer> {
        self.quantizer.as_ref()
    }

    pub fn num_contexts(&self) -> usize {
        self.num_contexts
    }

    pub fn reward_mean(&self, context: usize, arm: usize) -> f64 {
        self.reward_means[context * self.num_arms + arm]
    }

    pub fn pulls(&self, context: usize, arm: usize) -> u64 {
        self.per_context_pulls[context * self.num_arms + arm]
    }

    pub fn context_counts(&self) -> &[u64] {
        &self.context_counts
    }

    fn row(&self, context: Context) -> Result<usize> {
        let i = match (context, &self.quantizer) {
            (Context::Continuous(y), Some(q)) => return q.bin(y),
            (Context::Discrete(i), None) => i,
            (Context::Discrete(_), Some(_)) => {
                return Err(Error::ContextKind {
                    expected: "continuous",
                })
            }
            (Context::Continuous(_), None) => {
                return Err(Error::ContextKind {
                    expected: "discrete",
                })
            }
        };
        if i >= self.num_contexts {
            return Err(Error::ContextOutOfRange {
                index: i,
                num_contexts: self.num_contexts,
            });
        }
        Ok(i)
    }

    pub fn index(&self, context: usize, arm: usize) -> f64 {
        let k = self.num_arms;
        let n = (self.context_counts[context] + 1) as f64;
        let scale = self.bonus_scale.as_ref().map_or(1.0, |s| s[context]);
        self.reward_means[context * k + arm]
            + scale * (2.0 * n.ln() / self.per_context_pulls[context * k + arm] as f64).sqrt()
    }

    pub fn select_row(&self, i: usize) -> usize {
        let k = self.num_arms;
        let pulls = &self.per_context_pulls[i * k..(i + 1) * k];
        if let Some(j) = pulls.iter().position(|&m| m == 0) {
            return j;
        }
        let means = &self.reward_means[i * k..(i + 1) * k];
        let log_term = 2.0 * ((self.context_counts[i] + 1) as f64).ln();
        let scale = self.bonus_scale.as_ref().map_or(1.0, |s| s[i]);
        argmax(k, |j| {
            means[j] + scale * (log_term / pulls[j] as f64).sqrt()
        })
    }

    pub fn update_row(&mut self, i: usize, arm: usize, reward: f64) -> Result<()> {
        let k = self.num_arms;
        if arm >= k {
            return Err(Error::ArmOutOfRange { arm, num_arms: k });
        }
        let cell = i * k + arm;
        self.reward_means[cell] = push_mean(
            self.reward_means[cell],
            self.per_context_pulls[cell],
            reward,
        );
        self.per_context_pulls[cell] += 1;
        self.context_counts[i] += 1;
        Ok(())
    }
}

impl Policy for MultiUcb {
    fn num_arms(&self) -> usize {
        self.num_arms
    }

    fn select(&self, context: Context) -> Result<usize> {
        Ok(self.select_row(self.row(context)?))
    }

    fn update(&mut self, context: Context, arm: usize, feedback: Feedback) -> Result<()> {
        let i = self.row(context)?;
        self.update_row(i, arm, feedback.reward)
    }
}
