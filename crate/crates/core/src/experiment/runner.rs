use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::env::{genie_arm_continuous, ArmSpec, Environment, RewardSpec};
use crate::error::{Error, Result};
use crate::policy::{
    Ccb, Context, Dcb, DoublingCcb, Feedback, MultiUcb, Policy, Quantizer, Ucb1, Ucb1Feedback,
};

/// Which policy to simulate, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PolicySpec {
    Dcb {
        epsilon: f64,
    },
    Ucb1 {
        epsilon: f64,
        feedback: Ucb1Feedback,
    },
    /// `delta` quantizes a continuous context space.
    MultiUcb {
        scaled_bonus: bool,
        delta: Option<f64>,
    },
    Ccb {
        epsilon: f64,
        delta: f64,
    },
    CcbDoubling {
        epsilon: f64,
        alpha: f64,
    },
    /// Always plays the genie's arm.
    Oracle,
}

impl PolicySpec {
    pub fn label(&self) -> String {
        match self {
            PolicySpec::Dcb { epsilon } => format!("DCB({epsilon})"),
            PolicySpec::Ucb1 { epsilon, .. } if *epsilon == 0.0 => "UCB1".to_string(),
            PolicySpec::Ucb1 { epsilon, .. } => format!("UCB1({epsilon})"),
            PolicySpec::MultiUcb { delta: None, .. } => "Multi-UCB".to_string(),
            PolicySpec::MultiUcb { delta: Some(d), .. } => format!("Multi-UCB(delta={d:.3e})"),
            PolicySpec::Ccb { epsilon, delta } => format!("CCB({epsilon}, {delta:.3e})"),
            PolicySpec::CcbDoubling { epsilon, alpha } => {
                format!("CCB-doubling({epsilon}, alpha={alpha:.4})")
            }
            PolicySpec::Oracle => "genie".to_string(),
        }
    }

    pub fn build(&self, env: &Environment) -> Result<Box<dyn Policy>> {
        let k = env.num_arms();
        Ok(match self {
            PolicySpec::Dcb { epsilon } => Box::new(Dcb::new(&env.discrete_problem()?, *epsilon)?),
            PolicySpec::Ucb1 { epsilon, feedback } => {
                Box::new(Ucb1::new(k, *epsilon)?.with_feedback(*feedback))
            }
            PolicySpec::MultiUcb {
                scaled_bonus,
                delta,
            } => {
                let (policy, centers) = match (delta, env.num_contexts()) {
                    (Some(d), None) => {
                        let (lo, hi) = env.context_support();
                        let q = Quantizer::new(*d, lo, hi)?;
                        let centers = q.centers();
                        (MultiUcb::quantized(q, k)?, centers)
                    }
                    (None, Some(m)) => {
                        let centers = env.discrete_problem()?.contexts;
                        (MultiUcb::new(m, k)?, centers)
                    }
                    (None, None) => return Err(Error::NeedsDiscrete("unquantized Multi-UCB")),
                    (Some(_), Some(_)) => {
                        return Err(Error::ContextKind {
                            expected: "continuous",
                        })
                    }
                };
                if *scaled_bonus {
                    let support = env.arm_support();
                    let ranges = centers
                        .iter()
                        .map(|&y| crate::env::reward_range(&support, |x| env.reward.eval(y, x)))
                        .collect();
                    Box::new(policy.with_scaled_bonus(ranges)?)
                } else {
                    Box::new(policy)
                }
            }
            PolicySpec::Ccb { epsilon, delta } => {
                if env.is_discrete() {
                    return Err(Error::ContextKind {
                        expected: "continuous",
                    });
                }
                Box::new(Ccb::new(
                    *delta,
                    env.context_support(),
                    env.arm_support(),
                    env.reward.function.clone(),
                    k,
                    *epsilon,
                )?)
            }
            PolicySpec::CcbDoubling { epsilon, alpha } => {
                if env.is_discrete() {
                    return Err(Error::ContextKind {
                        expected: "continuous",
                    });
                }
                Box::new(DoublingCcb::new(
                    *alpha,
                    env.context_support(),
                    env.arm_support(),
                    env.reward.function.clone(),
                    k,
                    *epsilon,
                )?)
            }
            PolicySpec::Oracle => Box::new(Oracle::new(env)?),
        })
    }
}

/// Plays the Bayes-optimal arm for every context.
#[derive(Debug, Clone)]
pub struct Oracle {
    h_star: Option<Vec<usize>>,
    arms: Vec<ArmSpec>,
    reward: RewardSpec,
}

impl Oracle {
    pub fn new(env: &Environment) -> Result<Self> {
        let h_star = if env.is_discrete() {
            Some(env.genie()?.h_star)
        } else {
            None
        };
        Ok(Self {
            h_star,
            arms: env.arms.clone(),
            reward: env.reward.clone(),
        })
    }
}

impl Policy for Oracle {
    fn num_arms(&self) -> usize {
        self.arms.len()
    }

    fn select(&self, context: Context) -> Result<usize> {
        match (context, &self.h_star) {
            (Context::Discrete(i), Some(h)) => h.get(i).copied().ok_or(Error::ContextOutOfRange {
                index: i,
                num_contexts: h.len(),
            }),
            (Context::Continuous(y), None) => {
                Ok(genie_arm_continuous(y, &self.arms, &self.reward).0)
            }
            _ => Err(Error::ContextKind {
                expected: "matching",
            }),
        }
    }

    fn update(&mut self, _: Context, _: usize, _: Feedback) -> Result<()> {
        Ok(())
    }
}

/// Trials `round(10^(k/8))` up to `horizon`, plus `horizon` itself.
pub fn log_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for k in 0.. {
        let t = 10f64.powf(k as f64 / 8.0).round();
        if t > horizon as f64 {
            break;
        }
        out.push(t as u64);
    }
    out.push(horizon);
    out.dedup();
    out
}

/// A fully resolved simulation run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub environment: Environment,
    pub policy: PolicySpec,
    pub horizon: u64,
    pub replications: usize,
    pub seed: u64,
    pub checkpoints: Vec<u64>,
}

impl Experiment {
    pub fn new(
        environment: Environment,
        policy: PolicySpec,
        horizon: u64,
        replications: usize,
        seed: u64,
    ) -> Self {
        Self {
            environment,
            policy,
            horizon,
            replications,
            seed,
            checkpoints: log_checkpoints(horizon),
        }
    }

    /// Replaces the checkpoints; they are sorted, deduplicated and clipped
    /// to `1..=horizon`.
    pub fn with_checkpoints(mut self, mut checkpoints: Vec<u64>) -> Self {
        checkpoints.retain(|&t| t >= 1 && t <= self.horizon);
        checkpoints.sort_unstable();
        checkpoints.dedup();
        self.checkpoints = checkpoints;
        self
    }

    fn validate(&self) -> Result<()> {
        self.environment.validate()?;
        if self.replications == 0 {
            return Err(Error::NoReplications);
        }
        let k = self.environment.num_arms();
        if self.horizon < k as u64 {
            return Err(Error::HorizonTooShort {
                horizon: self.horizon,
                num_arms: k,
            });
        }
        if let Some(&t) = self
            .checkpoints
            .iter()
            .find(|&&t| t == 0 || t > self.horizon)
        {
            return Err(Error::MissingCheckpoint(t));
        }
        Ok(())
    }
}

/// Raw per-checkpoint record of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationTrace {
    pub regret: Vec<f64>,
    pub pulls: Vec<Vec<u64>>,
    pub non_optimal_pulls: Vec<Vec<u64>>,
    /// `(context, arm)` for every trial, when requested.
    pub log: Option<Vec<(Context, usize)>>,
}

enum Scorer {
    Discrete {
        gaps: Vec<Vec<f64>>,
        h_star: Vec<usize>,
    },
    Continuous,
}

impl Scorer {
    fn new(env: &Environment) -> Result<Self> {
        if env.is_discrete() {
            let g = env.genie()?;
            Ok(Scorer::Discrete {
                gaps: g.gaps,
                h_star: g.h_star,
            })
        } else {
            Ok(Scorer::Continuous)
        }
    }

    /// Expected-reward gap of `arm` and whether it differs from the genie's.
    #[inline]
    fn score(&self, env: &Environment, context: Context, arm: usize) -> (f64, bool) {
        match (self, context) {
            (Scorer::Discrete { gaps, h_star }, Context::Discrete(i)) => {
                (gaps[i][arm], arm != h_star[i])
            }
            (_, c) => {
                let y = env.context_value(c);
                let (best, best_value) = genie_arm_continuous(y, &env.arms, &env.reward);
                if best == arm {
                    (0.0, false)
                } else {
                    ((best_value - env.expected_reward(y, arm)).max(0.0), true)
                }
            }
        }
    }
}

/// Derives the generator for replication `rep`: one ChaCha stream per
/// replication under the master seed, independent of execution order.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Simulates replication `rep` of `exp`.
pub fn simulate_replication(
    exp: &Experiment,
    rep: u64,
    keep_log: bool,
) -> Result<ReplicationTrace> {
    exp.validate()?;
    let scorer = Scorer::new(&exp.environment)?;
    simulate(exp, &scorer, rep, keep_log)
}

fn simulate(
    exp: &Experiment,
    scorer: &Scorer,
    rep: u64,
    keep_log: bool,
) -> Result<ReplicationTrace> {
    let env = &exp.environment;
    let k = env.num_arms();
    let mut policy = exp.policy.build(env)?;
    let mut rng = replication_rng(exp.seed, rep);
    let mut values = vec![0.0; k];
    let mut pulls = vec![0u64; k];
    let mut non_opt = vec![0u64; k];
    let mut regret = 0.0;
    let mut trace = ReplicationTrace {
        regret: Vec::with_capacity(exp.checkpoints.len()),
        pulls: Vec::with_capacity(exp.checkpoints.len()),
        non_optimal_pulls: Vec::with_capacity(exp.checkpoints.len()),
        log: keep_log.then(|| Vec::with_capacity(exp.horizon as usize)),
    };
    let mut next = exp.checkpoints.iter().peekable();

    for t in 1..=exp.horizon {
        let context = env.sample_into(&mut rng, &mut values);
        let arm = policy.select(context)?;
        let x = values[arm];
        let reward = env.reward.eval(env.context_value(context), x);
        policy.update(context, arm, Feedback { value: x, reward })?;

        let (gap, non_optimal) = scorer.score(env, context, arm);
        regret += gap;
        pulls[arm] += 1;
        if non_optimal {
            non_opt[arm] += 1;
        }
        if let Some(log) = trace.log.as_mut() {
            log.push((context, arm));
        }
        if next.peek() == Some(&&t) {
            next.next();
            trace.regret.push(regret);
            trace.pulls.push(pulls.clone());
            trace.non_optimal_pulls.push(non_opt.clone());
        }
    }
    Ok(trace)
}

/// Replication-averaged regret curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretTrace {
    pub label: String,
    pub horizon: u64,
    pub replications: usize,
    pub checkpoints: Vec<u64>,
    pub mean_regret: Vec<f64>,
    pub stderr_regret: Vec<f64>,
    /// `[checkpoint][arm]` mean of `T_j(t)`.
    pub mean_pulls: Vec<Vec<f64>>,
    pub stderr_pulls: Vec<Vec<f64>>,
    /// `[checkpoint][arm]` mean of `T_j^N(t)`.
    pub mean_non_optimal_pulls: Vec<Vec<f64>>,
    pub stderr_non_optimal_pulls: Vec<Vec<f64>>,
}

/// Mean and standard error, summed in sorted order so that the result does
/// not depend on the order of `values`.
pub fn mean_stderr(values: &mut [f64]) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    sq.sort_by(f64::total_cmp);
    let var = sq.iter().sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl RegretTrace {
    pub fn aggregate(
        label: impl Into<String>,
        horizon: u64,
        checkpoints: &[u64],
        reps: &[ReplicationTrace],
    ) -> Self {
        let num_arms = reps
            .first()
            .and_then(|r| r.pulls.first())
            .map_or(0, Vec::len);
        let mut mean_regret = Vec::with_capacity(checkpoints.len());
        let mut stderr_regret = Vec::with_capacity(checkpoints.len());
        let mut mean_pulls = Vec::with_capacity(checkpoints.len());
        let mut stderr_pulls = Vec::with_capacity(checkpoints.len());
        let mut mean_nop = Vec::with_capacity(checkpoints.len());
        let mut stderr_nop = Vec::with_capacity(checkpoints.len());
        let mut buf = Vec::with_capacity(reps.len());
        for c in 0..checkpoints.len() {
            buf.clear();
            buf.extend(reps.iter().map(|r| r.regret[c]));
            let (m, s) = mean_stderr(&mut buf);
            mean_regret.push(m);
            stderr_regret.push(s);

            let (mut pm, mut ps, mut nm, mut ns) = (vec![], vec![], vec![], vec![]);
            for j in 0..num_arms {
                buf.clear();
                buf.extend(reps.iter().map(|r| r.pulls[c][j] as f64));
                let (m, s) = mean_stderr(&mut buf);
                pm.push(m);
                ps.push(s);
                buf.clear();
                buf.extend(reps.iter().map(|r| r.non_optimal_pulls[c][j] as f64));
                let (m, s) = mean_stderr(&mut buf);
                nm.push(m);
                ns.push(s);
            }
            mean_pulls.push(pm);
            stderr_pulls.push(ps);
            mean_nop.push(nm);
            stderr_nop.push(ns);
        }
        Self {
            label: label.into(),
            horizon,
            replications: reps.len(),
            checkpoints: checkpoints.to_vec(),
            mean_regret,
            stderr_regret,
            mean_pulls,
            stderr_pulls,
            mean_non_optimal_pulls: mean_nop,
            stderr_non_optimal_pulls: stderr_nop,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.mean_pulls.first().map_or(0, Vec::len)
    }

    pub fn position(&self, trial: u64) -> Option<usize> {
        self.checkpoints.binary_search(&trial).ok()
    }

    /// Position of the last checkpoint at or before `trial`.
    pub fn position_at_or_before(&self, trial: u64) -> Option<usize> {
        match self.checkpoints.binary_search(&trial) {
            Ok(p) => Some(p),
            Err(0) => None,
            Err(p) => Some(p - 1),
        }
    }

    pub fn regret_at(&self, trial: u64) -> Result<f64> {
        self.position(trial)
            .map(|p| self.mean_regret[p])
            .ok_or(Error::MissingCheckpoint(trial))
    }

    pub fn final_regret(&self) -> f64 {
        self.mean_regret.last().copied().unwrap_or(0.0)
    }

    pub fn final_stderr(&self) -> f64 {
        self.stderr_regret.last().copied().unwrap_or(0.0)
    }

    /// `trial,mean_regret,stderr,pulls_arm1,...` with one row per checkpoint.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        write!(out, "trial,mean_regret,stderr")?;
        for j in 1..=self.num_arms() {
            write!(out, ",pulls_arm{j}")?;
        }
        writeln!(out)?;
        for (c, t) in self.checkpoints.iter().enumerate() {
            write!(out, "{t},{},{}", self.mean_regret[c], self.stderr_regret[c])?;
            for p in &self.mean_pulls[c] {
                write!(out, ",{p}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Runs every replication (in parallel) and averages them.
pub fn run_experiment(exp: &Experiment) -> Result<RegretTrace> {
    exp.validate()?;
    let scorer = Scorer::new(&exp.environment)?;
    let reps: Vec<ReplicationTrace> = (0..exp.replications as u64)
        .into_par_iter()
        .map(|rep| simulate(exp, &scorer, rep, false))
        .collect::<Result<_>>()?;
    Ok(RegretTrace::aggregate(
        exp.policy.label(),
        exp.horizon,
        &exp.checkpoints,
        &reps,
    ))
}
