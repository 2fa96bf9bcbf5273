//! TOML experiment configuration.
//!
//! ```toml
//! name = "k7-dcb"
//! horizon = 100000
//! replications = 20
//! seed = 42
//!
//! [policy]
//! type = "dcb"
//! epsilon = 0.01
//!
//! [environment]
//! preset = "channel-k7"
//! ```
//!
//! Instead of `preset` the environment may be given inline with
//! `contexts`, `arms` and `reward` tables. Every field is optional at parse
//! time so that command-line flags can fill in or override it; validation
//! then reports every problem at once.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::env::{preset, ArmSpec, ContextSpec, Environment, RewardSpec};
use crate::experiment::{Experiment, PolicySpec};
use crate::policy::Ucb1Feedback;

pub const DEFAULT_REPLICATIONS: usize = 10;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_EPSILON: f64 = 0.01;

pub const POLICY_TYPES: [&str; 5] = ["dcb", "ucb1", "multi-ucb", "ccb", "ccb-doubling"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    #[serde(rename = "type")]
    pub kind: Option<String>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    /// Multi-UCB only: scale the confidence term by the context's reward range.
    pub scaled_bonus: Option<bool>,
    /// UCB1 only: average raw arm values or received rewards.
    pub feedback: Option<Ucb1Feedback>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub preset: Option<String>,
    pub contexts: Option<ContextSpec>,
    pub arms: Option<Vec<ArmSpec>>,
    pub reward: Option<RewardSpec>,
}

impl EnvironmentConfig {
    pub fn preset(name: impl Into<String>) -> Self {
        Self {
            preset: Some(name.into()),
            ..Self::default()
        }
    }

    fn resolve(&self, errors: &mut Vec<String>) -> Option<Environment> {
        let inline = self.contexts.is_some() || self.arms.is_some() || self.reward.is_some();
        match (&self.preset, inline) {
            (Some(_), true) => {
                errors.push(
                    "environment: give either `preset` or inline contexts/arms/reward, not both"
                        .into(),
                );
                None
            }
            (Some(name), false) => match preset(name) {
                Ok(env) => Some(env),
                Err(e) => {
                    errors.push(format!("environment: {e}"));
                    None
                }
            },
            (None, true) => {
                let mut missing = vec![];
                if self.contexts.is_none() {
                    missing.push("contexts");
                }
                if self.arms.is_none() {
                    missing.push("arms");
                }
                if self.reward.is_none() {
                    missing.push("reward");
                }
                if !missing.is_empty() {
                    errors.push(format!("environment: missing {}", missing.join(", ")));
                    return None;
                }
                let env = Environment {
                    contexts: self.contexts.clone()?,
                    arms: self.arms.clone()?,
                    reward: self.reward.clone()?,
                };
                match env.validate() {
                    Ok(()) => Some(env),
                    Err(e) => {
                        errors.push(format!("environment: {e}"));
                        None
                    }
                }
            }
            (None, false) => {
                errors.push(
                    "environment: missing (set `preset` or inline contexts/arms/reward)".into(),
                );
                None
            }
        }
    }
}

/// Unvalidated experiment description, as read from a file and/or flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    #[serde(default)]
    pub policy: PolicyConfig,
    #[serde(default)]
    pub environment: EnvironmentConfig,
    pub horizon: Option<u64>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub checkpoints: Option<Vec<u64>>,
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// A configuration that passed validation.
#[derive(Debug, Clone)]
pub struct ValidConfig {
    pub name: String,
    pub experiment: Experiment,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigErrors> {
        toml::from_str(text).map_err(|e| ConfigErrors(vec![format!("malformed config: {e}")]))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<ValidConfig, ConfigErrors> {
        let mut errors = Vec::new();
        let env = self.environment.resolve(&mut errors);
        let policy = self.policy_spec(env.as_ref(), &mut errors);

        let horizon = match self.horizon {
            None => {
                errors.push("horizon: missing".into());
                None
            }
            Some(0) => {
                errors.push("horizon: must be positive".into());
                None
            }
            Some(t) => Some(t),
        };
        if let (Some(t), Some(env)) = (horizon, &env) {
            if t < env.num_arms() as u64 {
                errors.push(format!(
                    "horizon: {t} is shorter than the number of arms ({})",
                    env.num_arms()
                ));
            }
        }
        let replications = self.replications.unwrap_or(DEFAULT_REPLICATIONS);
        if replications == 0 {
            errors.push("replications: must be at least 1".into());
        }
        if let (Some(cps), Some(t)) = (&self.checkpoints, horizon) {
            if cps.is_empty() {
                errors.push("checkpoints: list is empty".into());
            }
            for &c in cps {
                if c == 0 || c > t {
                    errors.push(format!("checkpoints: {c} is outside 1..={t}"));
                }
            }
        }

        match (env, policy, horizon) {
            (Some(env), Some(policy), Some(horizon)) if errors.is_empty() => {
                let mut experiment = Experiment::new(
                    env,
                    policy,
                    horizon,
                    replications,
                    self.seed.unwrap_or(DEFAULT_SEED),
                );
                if let Some(cps) = &self.checkpoints {
                    experiment = experiment.with_checkpoints(cps.clone());
                }
                Ok(ValidConfig {
                    name: self
                        .name
                        .clone()
                        .unwrap_or_else(|| "experiment".to_string()),
                    experiment,
                })
            }
            _ => Err(ConfigErrors(errors)),
        }
    }

    fn policy_spec(
        &self,
        env: Option<&Environment>,
        errors: &mut Vec<String>,
    ) -> Option<PolicySpec> {
        let p = &self.policy;
        let Some(kind) = p.kind.as_deref() else {
            errors.push(format!(
                "policy.type: missing (one of {})",
                POLICY_TYPES.join(", ")
            ));
            return None;
        };
        let before = errors.len();
        let positive_epsilon = |errors: &mut Vec<String>| {
            let eps = p.epsilon.unwrap_or(DEFAULT_EPSILON);
            if !(eps > 0.0) {
                errors.push(format!(
                    "policy.epsilon: {kind} requires epsilon > 0, got {eps}"
                ));
            }
            eps
        };
        let required = |errors: &mut Vec<String>, value: Option<f64>, field: &str| {
            if value.is_none() {
                errors.push(format!("policy.{field}: required for {kind}"));
            }
            value.unwrap_or(f64::NAN)
        };
        let discrete = env.map(Environment::is_discrete);
        let spec = match kind {
            "dcb" => PolicySpec::Dcb {
                epsilon: positive_epsilon(errors),
            },
            "ucb1" => {
                let epsilon = p.epsilon.unwrap_or(0.0);
                if !(epsilon >= 0.0) {
                    errors.push(format!(
                        "policy.epsilon: ucb1 requires epsilon >= 0, got {epsilon}"
                    ));
                }
                PolicySpec::Ucb1 {
                    epsilon,
                    feedback: p.feedback.unwrap_or_default(),
                }
            }
            "multi-ucb" => {
                match (discrete, p.delta) {
                    (Some(false), None) => errors.push(
                        "policy.delta: multi-ucb on a continuous environment needs a quantization width".into(),
                    ),
                    (Some(true), Some(_)) => errors.push(
                        "policy.delta: multi-ucb on a discrete environment takes no quantization width".into(),
                    ),
                    _ => {}
                }
                PolicySpec::MultiUcb {
                    scaled_bonus: p.scaled_bonus.unwrap_or(false),
                    delta: p.delta,
                }
            }
            "ccb" => PolicySpec::Ccb {
                epsilon: positive_epsilon(errors),
                delta: required(errors, p.delta, "delta"),
            },
            "ccb-doubling" => PolicySpec::CcbDoubling {
                epsilon: positive_epsilon(errors),
                alpha: required(errors, p.alpha, "alpha"),
            },
            other => {
                errors.push(format!(
                    "policy.type: unknown policy `{other}` (expected one of {})",
                    POLICY_TYPES.join(", ")
                ));
                return None;
            }
        };
        if matches!(kind, "ccb" | "ccb-doubling") && discrete == Some(true) {
            errors.push(format!(
                "policy.type: {kind} needs a continuous context space; use dcb, multi-ucb or ucb1"
            ));
        }
        if kind == "dcb" && discrete == Some(false) {
            errors.push(
                "policy.type: dcb needs a discrete context space; use ccb, ccb-doubling or ucb1"
                    .into(),
            );
        }
        if let Some(d) = p.delta {
            if kind != "ccb" && kind != "multi-ucb" {
                errors.push(format!("policy.delta: not used by {kind}"));
            } else if let Some(env) = env.filter(|e| !e.is_discrete()) {
                let (lo, hi) = env.context_support();
                if !(d > 0.0 && d <= hi - lo) {
                    errors.push(format!(
                        "policy.delta: must lie in (0, {}], got {d}",
                        hi - lo
                    ));
                }
            }
        }
        if let Some(a) = p.alpha {
            if kind != "ccb-doubling" {
                errors.push(format!("policy.alpha: not used by {kind}"));
            } else if !(a > 0.0 && a < 1.0) {
                errors.push(format!("policy.alpha: must lie in (0, 1), got {a}"));
            }
        }
        if p.epsilon.is_some() && kind == "multi-ucb" {
            errors.push("policy.epsilon: not used by multi-ucb".into());
        }
        if p.scaled_bonus.is_some() && kind != "multi-ucb" {
            errors.push(format!("policy.scaled_bonus: not used by {kind}"));
        }
        if p.feedback.is_some() && kind != "ucb1" {
            errors.push(format!("policy.feedback: not used by {kind}"));
        }
        (errors.len() == before).then_some(spec)
    }
}

/// Parses and validates a TOML document in one step.
pub fn parse_config(text: &str) -> Result<ValidConfig, ConfigErrors> {
    ExperimentConfig::from_toml(text)?.validate()
}
