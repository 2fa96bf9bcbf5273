//! Monte Carlo regret simulation and the analysis run on its output.

mod analysis;
mod runner;

pub use analysis::{
    compute_n_o, evaluate_theorem1_bound, evaluate_theorem3_slope, fit_log_slope,
    half_window_slopes, lemma1_bound, lemma1_condition_holds, lemma1_condition_rhs, theorem1_rhs,
    theorem2_flatness, theorem3_coefficient, verify_lemma1, BoundReport, LogFit,
};
pub use runner::{
    log_checkpoints, mean_stderr, replication_rng, run_experiment, simulate_replication,
    Experiment, Oracle, PolicySpec, RegretTrace, ReplicationTrace,
};
