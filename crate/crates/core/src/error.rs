use thiserror::Error;

/// Errors raised by policies, environments and the experiment runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("epsilon must be strictly positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(f64),
    #[error("at least one arm is required")]
    NoArms,
    #[error("at least one context is required")]
    NoContexts,
    #[error("arm index {arm} out of range for {num_arms} arms")]
    ArmOutOfRange { arm: usize, num_arms: usize },
    #[error("context index {index} out of range for {num_contexts} contexts")]
    ContextOutOfRange { index: usize, num_contexts: usize },
    #[error("context value {value} outside support [{lo}, {hi}]")]
    ContextOutsideSupport { value: f64, lo: f64, hi: f64 },
    #[error("policy expects a {expected} context")]
    ContextKind { expected: &'static str },
    #[error("invalid quantization width {delta} for support of width {width}")]
    InvalidDelta { delta: f64, width: f64 },
    #[error("alpha must lie in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("probabilities must lie in [0, 1] and sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid reward function: {0}")]
    InvalidReward(String),
    #[error("horizon {horizon} is smaller than the number of arms {num_arms}")]
    HorizonTooShort { horizon: u64, num_arms: usize },
    #[error("at least one replication is required")]
    NoReplications,
    #[error("arm {0} is optimal for some context")]
    ArmIsOptimal(usize),
    #[error("arm {0} is not optimal for any context")]
    ArmIsNotOptimal(usize),
    #[error("{0} requires a discrete-context environment")]
    NeedsDiscrete(&'static str),
    #[error("no checkpoint at trial {0}")]
    MissingCheckpoint(u64),
    #[error("need at least {needed} checkpoints in the tail window, found {found}")]
    TooFewCheckpoints { needed: usize, found: usize },
    #[error("n = {n} violates the lemma condition: floor(n/K) = {lhs} <= {rhs}")]
    LemmaCondition { n: u64, lhs: u64, rhs: f64 },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("unknown artifact `{0}`")]
    UnknownArtifact(String),
}

pub type Result<T> = std::result::Result<T, Error>;
