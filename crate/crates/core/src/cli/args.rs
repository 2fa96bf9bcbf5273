use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::policy::Ucb1Feedback;
use crate::reproduce::ARTIFACTS;

#[derive(Debug, Parser)]
#[command(
    name = "ctxbandit",
    version,
    about = "Contextual bandits with known reward functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one policy and print its regret trace as CSV.
    Run(RunArgs),
    /// Rerun a published table or figure.
    Reproduce(ReproduceArgs),
    /// Check a regret bound empirically.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FeedbackArg {
    Value,
    Reward,
}

fn parse_feedback(s: &str) -> Result<Ucb1Feedback, String> {
    match FeedbackArg::from_str(s, true)? {
        FeedbackArg::Value => Ok(Ucb1Feedback::Value),
        FeedbackArg::Reward => Ok(Ucb1Feedback::Reward),
    }
}

/// Flags mirror the config file keys and override them.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub name: Option<String>,
    /// channel-k7, channel-k4 or energy-harvesting-k4.
    #[arg(long, required_unless_present = "config")]
    pub preset: Option<String>,
    /// dcb, ucb1, multi-ucb, ccb or ccb-doubling.
    #[arg(long, required_unless_present = "config")]
    pub policy: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Quantization width (ccb, multi-ucb on continuous contexts).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Doubling exponent, each phase uses width (2^m)^(alpha - 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// UCB1 observation: value or reward.
    #[arg(long, value_parser = parse_feedback)]
    pub feedback: Option<Ucb1Feedback>,
    /// Multi-UCB: scale the confidence term by each context's reward range.
    #[arg(long)]
    pub scaled_bonus: bool,
    #[arg(long, required_unless_present = "config")]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated trial indices to report.
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_parser = ARTIFACTS)]
    pub artifact: String,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tables only: print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub check: VerifyCheck,
    /// Print the reports as JSON.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum VerifyCheck {
    /// Pr{best arm pulled fewer than n/K times} under UCB1(eps) on
    /// Bernoulli arms.
    Lemma1 {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        means: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [150u64, 300, 600])]
        n: Vec<u64>,
        #[arg(long, default_value_t = 20_000)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Mean pulls of each never-optimal arm against its logarithmic bound.
    Theorem1 {
        #[arg(long, default_value = "channel-k7")]
        preset: String,
        #[arg(long, value_delimiter = ',', default_values_t = [1_000u64, 10_000, 100_000])]
        n: Vec<u64>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Growth of non-optimal pulls of optimal arms over the last decade.
    Theorem2 {
        #[arg(long, default_value = "channel-k7")]
        preset: String,
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Regret slope in ln n over the last decade against its coefficient.
    Theorem3 {
        #[arg(long, default_value = "channel-k7")]
        preset: String,
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}
