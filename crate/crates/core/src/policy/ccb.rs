use super::{Context, Dcb, DiscreteProblem, Feedback, Policy};
use crate::env::RewardFn;
use crate::error::{Error, Result};

/// Uniform partition of an interval into bins of width `delta`. When `delta`
/// does not divide the width the last bin is narrower.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    lo: f64,
    hi: f64,
    delta: f64,
    num_bins: usize,
}

impl Quantizer {
    pub fn new(delta: f64, lo: f64, hi: f64) -> Result<Self> {
        let width = hi - lo;
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidDelta { delta, width });
        }
        if !(delta > 0.0) || delta > width * (1.0 + 1e-12) {
            return Err(Error::InvalidDelta { delta, width });
        }
        let ratio = width / delta;
        // A ratio within rounding of an integer is that integer; otherwise
        // the remainder opens a partial bin.
        let nearest = ratio.round();
        let num_bins = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            ratio.ceil()
        } as usize;
        Ok(Self {
            lo,
            hi,
            delta,
            num_bins: num_bins.max(1),
        })
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn bin(&self, y: f64) -> Result<usize> {
        if !(y >= self.lo && y <= self.hi) {
            return Err(Error::ContextOutsideSupport {
                value: y,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let b = ((y - self.lo) / self.delta).floor() as usize;
        Ok(b.min(self.num_bins - 1))
    }

    /// Midpoint of bin `b`, truncated at the upper end of the support.
    pub fn center(&self, b: usize) -> f64 {
        let left = self.lo + b as f64 * self.delta;
        let right = if b + 1 == self.num_bins {
            self.hi
        } else {
            self.lo + (b + 1) as f64 * self.delta
        };
        0.5 * (left + right)
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.num_bins).map(|b| self.center(b)).collect()
    }

    pub fn quantize(&self, y: f64) -> Result<(usize, f64)> {
        let b = self.bin(y)?;
        Ok((b, self.center(b)))
    }
}

/// Continuous contextual bandit policy CCB(ε, δ): quantizes the context and
/// runs DCB(ε) over the bin centers.
#[derive(Debug, Clone)]
pub struct Ccb {
    quantizer: Quantizer,
    inner: Dcb,
}

impl Ccb {
    pub fn new(
        delta: f64,
        support: (f64, f64),
        arm_support: Vec<f64>,
        reward: RewardFn,
        num_arms: usize,
        epsilon: f64,
    ) -> Result<Self> {
        let quantizer = Quantizer::new(delta, support.0, support.1)?;
        let problem = DiscreteProblem::new(quantizer.centers(), arm_support, reward, num_arms);
        let inner = Dcb::new(&problem, epsilon)?;
        Ok(Self { quantizer, inner })
    }

    pub fn quantizer(&self) -> &Quantizer {
        &self.quantizer
    }

    pub fn inner(&self) -> &Dcb {
        &self.inner
    }

    pub fn select_value(&self, y: f64) -> Result<usize> {
        let b = self.quantizer.bin(y)?;
        self.inner.select_index(b)
    }

    pub fn update_value(&mut self, y: f64, arm: usize, value: f64) -> Result<()> {
        self.quantizer.bin(y)?;
        self.inner.update_value(arm, value)
    }
}

impl Policy for Ccb {
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    fn select(&self, context: Context) -> Result<usize> {
        match context {
            Context::Continuous(y) => self.select_value(y),
            Context::Discrete(_) => Err(Error::ContextKind {
                expected: "continuous",
            }),
        }
    }

    fn update(&mut self, context: Context, arm: usize, feedback: Feedback) -> Result<()> {
        match context {
            Context::Continuous(y) => self.update_value(y, arm, feedback.value),
            Context::Discrete(_) => Err(Error::ContextKind {
                expected: "continuous",
            }),
        }
    }
}
