use super::{Ccb, Context, Feedback, Policy};
use crate::env::RewardFn;
use crate::error::{Error, Result};

/// Horizon-free CCB(ε, δ) via the doubling trick.
///
/// Phase `m = 1, 2, ...` lasts `2^m` trials and runs a fresh CCB instance
/// with `delta = width * (2^m)^(alpha - 1)`, so that `delta * T` grows like
/// `T^alpha` within each phase. Nothing learned in one phase carries over.
#[derive(Debug, Clone)]
pub struct DoublingCcb {
    alpha: f64,
    epsilon: f64,
    support: (f64, f64),
    arm_support: Vec<f64>,
    reward: RewardFn,
    num_arms: usize,
    phase: u32,
    trials_in_phase: u64,
    inner: Ccb,
}

impl DoublingCcb {
    pub fn new(
        alpha: f64,
        support: (f64, f64),
        arm_support: Vec<f64>,
        reward: RewardFn,
        num_arms: usize,
        epsilon: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidAlpha(alpha));
        }
        let delta = Self::phase_delta(alpha, 1, support.1 - support.0);
        let inner = Ccb::new(
            delta,
            support,
            arm_support.clone(),
            reward.clone(),
            num_arms,
            epsilon,
        )?;
        Ok(Self {
            alpha,
            epsilon,
            support,
            arm_support,
            reward,
            num_arms,
            phase: 1,
            trials_in_phase: 0,
            inner,
        })
    }

    /// Quantization width used during `phase`.
    pub fn phase_delta(alpha: f64, phase: u32, width: f64) -> f64 {
        let len = 2f64.powi(phase as i32);
        (width * len.powf(alpha - 1.0)).min(width)
    }

    pub fn phase_len(phase: u32) -> u64 {
        1u64 << phase
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn trials_in_phase(&self) -> u64 {
        self.trials_in_phase
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn inner(&self) -> &Ccb {
        &self.inner
    }

    fn advance(&mut self) -> Result<()> {
        self.trials_in_phase += 1;
        if self.trials_in_phase == Self::phase_len(self.phase) {
            self.phase += 1;
            self.trials_in_phase = 0;
            let delta = Self::phase_delta(self.alpha, self.phase, self.support.1 - self.support.0);
            self.inner = Ccb::new(
                delta,
                self.support,
                self.arm_support.clone(),
                self.reward.clone(),
                self.num_arms,
                self.epsilon,
            )?;
        }
        Ok(())
    }
}

impl Policy for DoublingCcb {
    fn num_arms(&self) -> usize {
        self.num_arms
    }

    fn select(&self, context: Context) -> Result<usize> {
        self.inner.select(context)
    }

    fn update(&mut self, context: Context, arm: usize, feedback: Feedback) -> Result<()> {
        self.inner.update(context, arm, feedback)?;
        self.advance()
    }
}
