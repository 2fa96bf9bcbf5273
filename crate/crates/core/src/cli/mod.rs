//! Command-line front end.
//!
//! Data (CSV, tables, JSON) goes to `out`; progress and diagnostics go to
//! `err`. Exit codes: 0 success, 1 invalid input, 2 runtime failure, 3 a
//! verified bound that does not hold.

mod args;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::config::{EnvironmentConfig, ExperimentConfig};
use crate::env::preset;
use crate::experiment::{
    evaluate_theorem1_bound, evaluate_theorem3_slope, log_checkpoints, run_experiment,
    theorem2_flatness, verify_lemma1, BoundReport, Experiment, PolicySpec,
};
use crate::reproduce;

pub use args::{Cli, Command, ReproduceArgs, RunArgs, VerifyArgs, VerifyCheck};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_UNSATISFIED: i32 = 3;

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, out, err),
        Command::Reproduce(a) => cmd_reproduce(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

type CmdResult = std::result::Result<i32, Failure>;

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INVALID, e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_RUNTIME, e.to_string())
}

/// Reads the config file (if any) and lays the flags over it.
pub fn resolve_config(args: &RunArgs) -> std::result::Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(v) = &args.name {
        cfg.name = Some(v.clone());
    }
    if let Some(v) = &args.preset {
        cfg.environment = EnvironmentConfig::preset(v);
    }
    let p = &mut cfg.policy;
    if let Some(v) = &args.policy {
        p.kind = Some(v.clone());
    }
    if args.epsilon.is_some() {
        p.epsilon = args.epsilon;
    }
    if args.delta.is_some() {
        p.delta = args.delta;
    }
    if args.alpha.is_some() {
        p.alpha = args.alpha;
    }
    if args.feedback.is_some() {
        p.feedback = args.feedback;
    }
    if args.scaled_bonus {
        p.scaled_bonus = Some(true);
    }
    if args.horizon.is_some() {
        cfg.horizon = args.horizon;
    }
    if args.reps.is_some() {
        cfg.replications = args.reps;
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if let Some(c) = &args.checkpoints {
        cfg.checkpoints = Some(c.clone());
    }
    Ok(cfg)
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let cfg = resolve_config(args).map_err(invalid)?;
    let valid = cfg.validate().map_err(invalid)?;
    let exp = &valid.experiment;
    let _ = writeln!(
        err,
        "{}: {} on T={} x {} replications (seed {})",
        valid.name,
        exp.policy.label(),
        exp.horizon,
        exp.replications,
        exp.seed
    );
    let trace = run_experiment(exp).map_err(runtime)?;
    trace.write_csv(out).map_err(runtime)?;
    Ok(EXIT_OK)
}

fn cmd_reproduce(args: &ReproduceArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let name = args.artifact.as_str();
    let reps = args
        .reps
        .unwrap_or_else(|| reproduce::default_replications(name));
    let seed = args.seed.unwrap_or(reproduce::DEFAULT_SEED);
    if reps == 0 {
        return Err(invalid("--reps must be at least 1"));
    }
    let _ = writeln!(
        err,
        "reproducing {name} with {reps} replications (seed {seed})"
    );
    match name {
        "table1" | "table2" => {
            let report = if name == "table1" {
                reproduce::table1(reps, seed)
            } else {
                reproduce::table2(reps, seed)
            }
            .map_err(runtime)?;
            if args.json {
                serde_json::to_writer_pretty(&mut *out, &report).map_err(runtime)?;
                writeln!(out).map_err(runtime)?;
            } else {
                writeln!(out, "{report}").map_err(runtime)?;
            }
        }
        _ => {
            let fig = reproduce::figure(name, reps, seed).map_err(runtime)?;
            fig.write_csv(out).map_err(runtime)?;
        }
    }
    Ok(EXIT_OK)
}

fn dcb_trace(
    env_name: &str,
    epsilon: f64,
    horizon: u64,
    checkpoints: Vec<u64>,
    reps: usize,
    seed: u64,
) -> std::result::Result<crate::experiment::RegretTrace, Failure> {
    let env = preset(env_name).map_err(invalid)?;
    if !env.is_discrete() {
        return Err(invalid(format!(
            "{env_name} has a continuous context space"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if reps == 0 {
        return Err(invalid("--reps must be at least 1"));
    }
    if horizon < env.num_arms() as u64 {
        return Err(invalid(format!(
            "horizon {horizon} is shorter than the number of arms ({})",
            env.num_arms()
        )));
    }
    let exp = Experiment::new(env, PolicySpec::Dcb { epsilon }, horizon, reps, seed)
        .with_checkpoints(checkpoints);
    run_experiment(&exp).map_err(runtime)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let reports: Vec<BoundReport> = match &args.check {
        VerifyCheck::Lemma1 {
            k,
            means,
            epsilon,
            n,
            reps,
            seed,
        } => {
            if let Some(k) = k {
                if *k != means.len() {
                    return Err(invalid(format!(
                        "--k {k} does not match the {} means given",
                        means.len()
                    )));
                }
            }
            let _ = writeln!(err, "lemma1: {reps} replications of UCB1({epsilon})");
            verify_lemma1(means, *epsilon, n, *reps, *seed).map_err(invalid)?
        }
        VerifyCheck::Theorem1 {
            preset: env_name,
            n,
            epsilon,
            reps,
            seed,
        } => {
            let genie = preset(env_name).and_then(|e| e.genie()).map_err(invalid)?;
            if n.is_empty() {
                return Err(invalid("--n needs at least one trial index"));
            }
            let horizon = *n.iter().max().unwrap_or(&0);
            let _ = writeln!(
                err,
                "theorem1: DCB({epsilon}) on {env_name}, {reps} replications to n={horizon}"
            );
            let trace = dcb_trace(env_name, *epsilon, horizon, n.clone(), *reps, *seed)?;
            let mut reports = Vec::new();
            for &t in n {
                for &j in &genie.non_optimal_set {
                    reports.push(
                        evaluate_theorem1_bound(&trace, &genie, *epsilon, t, j).map_err(runtime)?,
                    );
                }
            }
            if reports.is_empty() {
                let _ = writeln!(
                    err,
                    "{env_name}: every arm is optimal for some context; nothing to check"
                );
            }
            reports
        }
        VerifyCheck::Theorem2 {
            preset: env_name,
            horizon,
            threshold,
            epsilon,
            reps,
            seed,
        } => {
            let genie = preset(env_name).and_then(|e| e.genie()).map_err(invalid)?;
            let _ = writeln!(
                err,
                "theorem2: DCB({epsilon}) on {env_name}, {reps} replications to T={horizon}"
            );
            let trace = dcb_trace(
                env_name,
                *epsilon,
                *horizon,
                log_checkpoints(*horizon),
                *reps,
                *seed,
            )?;
            theorem2_flatness(&trace, &genie, *threshold).map_err(runtime)?
        }
        VerifyCheck::Theorem3 {
            preset: env_name,
            horizon,
            epsilon,
            reps,
            seed,
        } => {
            let genie = preset(env_name).and_then(|e| e.genie()).map_err(invalid)?;
            let _ = writeln!(
                err,
                "theorem3: DCB({epsilon}) on {env_name}, {reps} replications to T={horizon}"
            );
            let trace = dcb_trace(
                env_name,
                *epsilon,
                *horizon,
                log_checkpoints(*horizon),
                *reps,
                *seed,
            )?;
            vec![evaluate_theorem3_slope(&trace, &genie, *epsilon).map_err(invalid)?]
        }
    };
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &reports).map_err(runtime)?;
        writeln!(out).map_err(runtime)?;
    } else {
        for r in &reports {
            writeln!(out, "{r}").map_err(runtime)?;
        }
    }
    Ok(if reports.iter().all(|r| r.satisfied) {
        EXIT_OK
    } else {
        EXIT_UNSATISFIED
    })
}
