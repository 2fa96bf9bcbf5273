use super::{ArmSpec, ContextSpec, Environment, RewardFn, RewardSpec};
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 3] = ["channel-k7", "channel-k4", "energy-harvesting-k4"];

/// Channel `j` (1-based) has capacity `j` with probability `(8 - j) / 10`
/// and is blocked otherwise.
fn channel_arms(k: usize) -> Vec<ArmSpec> {
    (1..=k)
        .map(|j| ArmSpec::scaled_bernoulli(j as f64, (8 - j) as f64 / 10.0))
        .collect()
}

fn channel_selection(k: usize) -> Environment {
    let contexts = ContextSpec::uniform_discrete(vec![1.0, 2.0, 3.0, 4.0]);
    Environment {
        contexts,
        arms: channel_arms(k),
        // min(y, x) <= max y = 4
        reward: RewardSpec::new(RewardFn::MinCapacity, 4.0, None),
    }
}

fn energy_harvesting() -> Environment {
    let arms = channel_arms(4);
    Environment {
        contexts: ContextSpec::Uniform { lo: 0.0, hi: 1.0 },
        arms,
        reward: RewardSpec::new(RewardFn::LogPower, 5f64.ln(), Some(4.0)),
    }
}

/// Looks up a named environment.
pub fn preset(name: &str) -> Result<Environment> {
    let env = match name {
        "channel-k7" => channel_selection(7),
        "channel-k4" => channel_selection(4),
        "energy-harvesting-k4" => energy_harvesting(),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    env.validate()?;
    Ok(env)
}
