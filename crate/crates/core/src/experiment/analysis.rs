//! Empirical checks of the regret guarantees against simulated traces.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::runner::{replication_rng, RegretTrace};
use crate::env::GenieTables;
use crate::error::{Error, Result};
use crate::policy::Ucb1;

/// Outcome of comparing an observed quantity with a theoretical upper bound.
/// `satisfied` holds when `observed <= bound + slack`, where `slack` is the
/// statistical allowance attached to the observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub bound: f64,
    pub observed: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, bound: f64, observed: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            bound,
            observed,
            slack,
            satisfied: observed <= bound + slack,
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: observed {:.6} vs bound {:.6} (slack {:.6})",
            if self.satisfied { "ok" } else { "VIOLATED" },
            self.name,
            self.observed,
            self.bound,
            self.slack
        )
    }
}

/// `4 (2 + eps) ln n / gap^2 + 1 + pi^2 / 3`.
pub fn theorem1_rhs(epsilon: f64, n: u64, min_gap: f64) -> f64 {
    4.0 * (2.0 + epsilon) * (n as f64).ln() / (min_gap * min_gap) + 1.0 + PI * PI / 3.0
}

/// Compares the mean pull count of non-optimal `arm` at trial `n` against
/// its logarithmic bound, with a 3 standard error allowance.
pub fn evaluate_theorem1_bound(
    trace: &RegretTrace,
    genie: &GenieTables,
    epsilon: f64,
    n: u64,
    arm: usize,
) -> Result<BoundReport> {
    if arm >= genie.num_arms() {
        return Err(Error::ArmOutOfRange {
            arm,
            num_arms: genie.num_arms(),
        });
    }
    if !genie.non_optimal_set.contains(&arm) {
        return Err(Error::ArmIsOptimal(arm));
    }
    let pos = trace.position(n).ok_or(Error::MissingCheckpoint(n))?;
    let bound = theorem1_rhs(epsilon, n, genie.min_gap(arm));
    Ok(BoundReport::new(
        format!("theorem1 arm {} n={}", arm + 1, n),
        bound,
        trace.mean_pulls[pos][arm],
        3.0 * trace.stderr_pulls[pos][arm],
    ))
}

/// `4 (2 + eps) delta_max |non-optimal| / delta_o^2`, zero when every arm is
/// optimal for some context.
pub fn theorem3_coefficient(genie: &GenieTables, epsilon: f64) -> f64 {
    match genie.delta_o {
        Some(d) if d > 0.0 && !genie.non_optimal_set.is_empty() => {
            4.0 * (2.0 + epsilon) * genie.delta_max * genie.non_optimal_set.len() as f64 / (d * d)
        }
        Some(_) if !genie.non_optimal_set.is_empty() => f64::INFINITY,
        _ => 0.0,
    }
}

/// Least-squares line of mean regret against `ln t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Fits regret against `ln t` over the checkpoints in `[from, to]`.
pub fn fit_log_slope(trace: &RegretTrace, from: u64, to: u64) -> Result<LogFit> {
    let pts: Vec<(f64, f64)> = trace
        .checkpoints
        .iter()
        .zip(&trace.mean_regret)
        .filter(|(&t, _)| t >= from && t <= to)
        .map(|(&t, &r)| ((t as f64).ln(), r))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewCheckpoints {
            needed: 3,
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(LogFit {
        slope,
        intercept: my - slope * mx,
        points: pts.len(),
    })
}

fn tail_start(horizon: u64) -> u64 {
    (horizon / 10).max(1)
}

/// Slopes over the two halves (in `ln t`) of the last decade.
pub fn half_window_slopes(trace: &RegretTrace) -> Result<(f64, f64)> {
    let t = trace.horizon;
    let mid = ((t as f64) / 10f64.sqrt()).round() as u64;
    let first = fit_log_slope(trace, tail_start(t), mid)?;
    let second = fit_log_slope(trace, mid, t)?;
    Ok((first.slope, second.slope))
}

/// Fits the regret slope in `ln t` over the last decade and compares it with
/// the logarithmic regret coefficient. The allowance is three standard
/// errors of the endpoint-difference slope estimate.
pub fn evaluate_theorem3_slope(
    trace: &RegretTrace,
    genie: &GenieTables,
    epsilon: f64,
) -> Result<BoundReport> {
    let t = trace.horizon;
    let fit = fit_log_slope(trace, tail_start(t), t)?;
    let lo = trace
        .checkpoints
        .iter()
        .position(|&c| c >= tail_start(t))
        .ok_or(Error::MissingCheckpoint(tail_start(t)))?;
    let hi = trace.checkpoints.len() - 1;
    let span = (trace.checkpoints[hi] as f64 / trace.checkpoints[lo] as f64).ln();
    let slack = 3.0 * (trace.stderr_regret[hi] + trace.stderr_regret[lo]) / span;
    Ok(BoundReport::new(
        format!("theorem3 slope ({})", trace.label),
        theorem3_coefficient(genie, epsilon),
        fit.slope,
        slack,
    ))
}

/// Smallest `n` with `floor(p_o n / 2K) > ceil(4 (2 + eps) ln n / delta_o^2)`.
pub fn compute_n_o(p_o: f64, delta_o: f64, epsilon: f64, num_arms: usize) -> u64 {
    let coef = 4.0 * (2.0 + epsilon) / (delta_o * delta_o);
    let denom = 2.0 * num_arms as f64;
    let mut n = 1u64;
    loop {
        let lhs = (p_o * n as f64 / denom).floor();
        let rhs = (coef * (n as f64).ln()).ceil();
        if lhs > rhs {
            return n;
        }
        n += 1;
    }
}

/// Checks that no optimal arm keeps accumulating non-optimal pulls over
/// the last decade: `T_j^N(T) - T_j^N(T/10) <= threshold` for each optimal
/// arm `j`.
pub fn theorem2_flatness(
    trace: &RegretTrace,
    genie: &GenieTables,
    threshold: f64,
) -> Result<Vec<BoundReport>> {
    let t = trace.horizon;
    let end = trace.position(t).ok_or(Error::MissingCheckpoint(t))?;
    let start = trace
        .position_at_or_before(tail_start(t))
        .ok_or(Error::MissingCheckpoint(tail_start(t)))?;
    Ok(genie
        .optimal_set
        .iter()
        .map(|&j| {
            let growth =
                trace.mean_non_optimal_pulls[end][j] - trace.mean_non_optimal_pulls[start][j];
            BoundReport::new(
                format!(
                    "theorem2 arm {} growth {}..{}",
                    j + 1,
                    trace.checkpoints[start],
                    t
                ),
                threshold,
                growth,
                0.0,
            )
        })
        .collect())
}

/// `2 K^(4 + 2 eps) / n^(2 + 2 eps)`.
pub fn lemma1_bound(num_arms: usize, epsilon: f64, n: u64) -> f64 {
    2.0 * (num_arms as f64).powf(4.0 + 2.0 * epsilon) / (n as f64).powf(2.0 + 2.0 * epsilon)
}

/// Right-hand side `4 (2 + eps) ln n / min_gap^2` of the validity condition.
pub fn lemma1_condition_rhs(min_gap: f64, epsilon: f64, n: u64) -> f64 {
    4.0 * (2.0 + epsilon) * (n as f64).ln() / (min_gap * min_gap)
}

pub fn lemma1_condition_holds(num_arms: usize, min_gap: f64, epsilon: f64, n: u64) -> bool {
    (n / num_arms as u64) as f64 > lemma1_condition_rhs(min_gap, epsilon, n)
}

/// Runs UCB1(eps) on Bernoulli arms with the given means and estimates
/// `Pr{T*(n) < n/K}` at each grid point, where `T*` counts pulls of the best
/// arm. Each grid point must satisfy the lemma's validity condition.
pub fn verify_lemma1(
    means: &[f64],
    epsilon: f64,
    n_grid: &[u64],
    replications: usize,
    seed: u64,
) -> Result<Vec<BoundReport>> {
    let k = means.len();
    if k == 0 {
        return Err(Error::NoArms);
    }
    if replications == 0 {
        return Err(Error::NoReplications);
    }
    if let Some(m) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(Error::InvalidDistribution(format!("Bernoulli mean {m}")));
    }
    let best = crate::policy::argmax(k, |j| means[j]);
    let min_gap = means
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != best)
        .map(|(_, &m)| means[best] - m)
        .fold(f64::INFINITY, f64::min);
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    for &n in &grid {
        if !lemma1_condition_holds(k, min_gap, epsilon, n) {
            return Err(Error::LemmaCondition {
                n,
                lhs: n / k as u64,
                rhs: lemma1_condition_rhs(min_gap, epsilon, n),
            });
        }
    }
    let horizon = *grid.last().unwrap_or(&0);

    let events: Vec<u64> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| -> Result<Vec<u64>> {
            let mut rng = replication_rng(seed, rep);
            let mut ucb = Ucb1::new(k, epsilon)?;
            let mut hits = vec![0u64; grid.len()];
            let mut g = 0;
            for t in 1..=horizon {
                let arm = ucb.choose();
                let r = if rng.random::<f64>() < means[arm] {
                    1.0
                } else {
                    0.0
                };
                ucb.observe(arm, r)?;
                if grid[g] == t {
                    if (ucb.pull_counts()[best] as f64) < t as f64 / k as f64 {
                        hits[g] = 1;
                    }
                    g += 1;
                }
            }
            Ok(hits)
        })
        .try_reduce(
            || vec![0u64; grid.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;

    let reps = replications as f64;
    Ok(grid
        .iter()
        .zip(events)
        .map(|(&n, count)| {
            let freq = count as f64 / reps;
            let stderr = (freq * (1.0 - freq) / reps).sqrt();
            BoundReport::new(
                format!("lemma1 K={k} n={n}"),
                lemma1_bound(k, epsilon, n),
                freq,
                3.0 * stderr,
            )
        })
        .collect())
}
