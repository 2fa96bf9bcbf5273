use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::Context;

const NORMALIZATION_TOL: f64 = 1e-9;

fn check_probabilities(probs: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    for p in probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::NotNormalized { sum: f64::NAN });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// Distribution of a single arm's state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ArmSpec {
    /// `value` with probability `prob`, zero otherwise.
    ScaledBernoulli { value: f64, prob: f64 },
    /// Finite discrete law given as `(value, probability)` pairs.
    Discrete { outcomes: Vec<(f64, f64)> },
}

impl ArmSpec {
    pub fn scaled_bernoulli(value: f64, prob: f64) -> Self {
        ArmSpec::ScaledBernoulli { value, prob }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ArmSpec::ScaledBernoulli { value, prob } => {
                if !value.is_finite() {
                    return Err(Error::InvalidDistribution(format!("arm value {value}")));
                }
                check_probabilities([*prob, 1.0 - *prob])
            }
            ArmSpec::Discrete { outcomes } => {
                if outcomes.is_empty() {
                    return Err(Error::InvalidDistribution("empty outcome list".into()));
                }
                if outcomes.iter().any(|(v, _)| !v.is_finite()) {
                    return Err(Error::InvalidDistribution("non-finite arm value".into()));
                }
                check_probabilities(outcomes.iter().map(|&(_, p)| p))
            }
        }
    }

    /// `(value, probability)` pairs with positive probability.
    pub fn outcomes(&self) -> Vec<(f64, f64)> {
        let all = match self {
            ArmSpec::ScaledBernoulli { value, prob } => vec![(0.0, 1.0 - prob), (*value, *prob)],
            ArmSpec::Discrete { outcomes } => outcomes.clone(),
        };
        all.into_iter().filter(|&(_, p)| p > 0.0).collect()
    }

    /// Exact expectation of `f(X)` by finite summation.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        match self {
            ArmSpec::ScaledBernoulli { value, prob } => (1.0 - prob) * f(0.0) + prob * f(*value),
            ArmSpec::Discrete { outcomes } => outcomes.iter().map(|&(v, p)| p * f(v)).sum(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match self {
            ArmSpec::ScaledBernoulli { value, prob } => {
                if u < *prob {
                    *value
                } else {
                    0.0
                }
            }
            ArmSpec::Discrete { outcomes } => {
                let mut acc = 0.0;
                for &(v, p) in outcomes {
                    acc += p;
                    if u < acc {
                        return v;
                    }
                }
                // rounding in the cumulative sum
                outcomes
                    .iter()
                    .rev()
                    .find(|(_, p)| *p > 0.0)
                    .map_or(0.0, |o| o.0)
            }
        }
    }
}

/// Distribution of the context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ContextSpec {
    /// Finite context set `values[i]` drawn with probability `probs[i]`.
    Discrete { values: Vec<f64>, probs: Vec<f64> },
    /// Uniform law on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
}

impl ContextSpec {
    pub fn uniform_discrete(values: Vec<f64>) -> Self {
        let p = 1.0 / values.len() as f64;
        let probs = vec![p; values.len()];
        ContextSpec::Discrete { values, probs }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ContextSpec::Discrete { values, probs } => {
                if values.is_empty() {
                    return Err(Error::NoContexts);
                }
                if values.len() != probs.len() {
                    return Err(Error::InvalidDistribution(format!(
                        "{} context values but {} probabilities",
                        values.len(),
                        probs.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidDistribution(
                        "non-finite context value".into(),
                    ));
                }
                if probs.iter().any(|&p| p <= 0.0) {
                    return Err(Error::InvalidDistribution(
                        "every context needs positive probability".into(),
                    ));
                }
                check_probabilities(probs.iter().copied())
            }
            ContextSpec::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidDistribution(format!(
                        "uniform support [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, ContextSpec::Discrete { .. })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Context {
        let u: f64 = rng.random();
        match self {
            ContextSpec::Discrete { probs, .. } => {
                let mut acc = 0.0;
                for (i, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return Context::Discrete(i);
                    }
                }
                Context::Discrete(probs.len() - 1)
            }
            ContextSpec::Uniform { lo, hi } => Context::Continuous(lo + (hi - lo) * u),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scaled_bernoulli_outcomes() {
        let arm = ArmSpec::scaled_bernoulli(7.0, 0.1);
        arm.validate().unwrap();
        assert_eq!(arm.outcomes(), vec![(0.0, 0.9), (7.0, 0.1)]);
        assert!((arm.mean() - 0.7).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws: Vec<f64> = (0..20_000).map(|_| arm.sample(&mut rng)).collect();
        assert!(draws.iter().all(|&v| v == 0.0 || v == 7.0));
        let freq = draws.iter().filter(|&&v| v == 7.0).count() as f64 / draws.len() as f64;
        // 5 sigma at p = 0.1, n = 20000
        assert!((freq - 0.1).abs() < 5.0 * (0.09f64 / 20_000.0).sqrt());
    }

    #[test]
    fn rejects_non_normalized() {
        let arm = ArmSpec::Discrete {
            outcomes: vec![(0.0, 0.5), (1.0, 0.6)],
        };
        assert!(matches!(arm.validate(), Err(Error::NotNormalized { .. })));
        assert!(ArmSpec::scaled_bernoulli(1.0, 1.5).validate().is_err());
        let ctx = ContextSpec::Discrete {
            values: vec![1.0, 2.0],
            probs: vec![0.5, 0.4],
        };
        assert!(ctx.validate().is_err());
        let zero = ContextSpec::Discrete {
            values: vec![1.0, 2.0],
            probs: vec![1.0, 0.0],
        };
        assert!(zero.validate().is_err());
        assert!(ContextSpec::Uniform { lo: 1.0, hi: 1.0 }
            .validate()
            .is_err());
    }

    #[test]
    fn uniform_discrete_context_frequencies() {
        let ctx = ContextSpec::uniform_discrete(vec![1.0, 2.0, 3.0, 4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            match ctx.sample(&mut rng) {
                Context::Discrete(i) => counts[i] += 1,
                Context::Continuous(_) => unreachable!(),
            }
        }
        let expected = n as f64 / 4.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // chi-square with 3 dof, 99.9% quantile
        assert!(chi2 < 16.27, "chi2 = {chi2}, counts = {counts:?}");
    }
}
