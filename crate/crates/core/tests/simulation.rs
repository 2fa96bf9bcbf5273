use ctxbandit::env::{genie_arm_continuous, preset};
use ctxbandit::experiment::{
    run_experiment, simulate_replication, Experiment, PolicySpec, RegretTrace,
};
use ctxbandit::policy::{Context, Ucb1Feedback};
use proptest::prelude::*;

fn exp(env: &str, policy: PolicySpec, horizon: u64, reps: usize, seed: u64) -> Experiment {
    Experiment::new(preset(env).unwrap(), policy, horizon, reps, seed)
}

fn all_policies() -> Vec<(&'static str, PolicySpec)> {
    vec![
        ("channel-k7", PolicySpec::Dcb { epsilon: 0.01 }),
        (
            "channel-k4",
            PolicySpec::Ucb1 {
                epsilon: 0.0,
                feedback: Ucb1Feedback::Value,
            },
        ),
        (
            "channel-k7",
            PolicySpec::MultiUcb {
                scaled_bonus: false,
                delta: None,
            },
        ),
        (
            "energy-harvesting-k4",
            PolicySpec::Ccb {
                epsilon: 0.01,
                delta: 0.05,
            },
        ),
        (
            "energy-harvesting-k4",
            PolicySpec::CcbDoubling {
                epsilon: 0.01,
                alpha: 0.5,
            },
        ),
        (
            "energy-harvesting-k4",
            PolicySpec::MultiUcb {
                scaled_bonus: true,
                delta: Some(0.1),
            },
        ),
    ]
}

#[test]
fn same_seed_same_trace() {
    for (env, policy) in all_policies() {
        let e = exp(env, policy, 3_000, 4, 7);
        assert_eq!(
            run_experiment(&e).unwrap(),
            run_experiment(&e).unwrap(),
            "{env}"
        );
    }
}

#[test]
fn different_seeds_differ() {
    let a = run_experiment(&exp(
        "channel-k7",
        PolicySpec::Dcb { epsilon: 0.01 },
        2_000,
        3,
        1,
    ))
    .unwrap();
    let b = run_experiment(&exp(
        "channel-k7",
        PolicySpec::Dcb { epsilon: 0.01 },
        2_000,
        3,
        2,
    ))
    .unwrap();
    assert_ne!(a.mean_regret, b.mean_regret);
}

#[test]
fn aggregate_ignores_replication_order() {
    let e = exp("channel-k4", PolicySpec::Dcb { epsilon: 0.01 }, 5_000, 6, 3);
    let mut reps: Vec<_> = (0..6)
        .map(|r| simulate_replication(&e, r, false).unwrap())
        .collect();
    let forward = RegretTrace::aggregate("x", e.horizon, &e.checkpoints, &reps);
    reps.reverse();
    reps.swap(1, 4);
    let shuffled = RegretTrace::aggregate("x", e.horizon, &e.checkpoints, &reps);
    assert_eq!(forward, shuffled);
    let parallel = run_experiment(&e).unwrap();
    assert_eq!(parallel.mean_regret, forward.mean_regret);
    assert_eq!(parallel.mean_pulls, forward.mean_pulls);
}

#[test]
fn replication_is_independent_of_count() {
    let small = exp("channel-k7", PolicySpec::Dcb { epsilon: 0.01 }, 1_000, 2, 9);
    let big = exp("channel-k7", PolicySpec::Dcb { epsilon: 0.01 }, 1_000, 8, 9);
    assert_eq!(
        simulate_replication(&small, 1, false).unwrap(),
        simulate_replication(&big, 1, false).unwrap()
    );
}

#[test]
fn discrete_regret_is_sum_of_gaps() {
    let e = exp("channel-k7", PolicySpec::Dcb { epsilon: 0.01 }, 4_000, 1, 5)
        .with_checkpoints(vec![4_000]);
    let genie = e.environment.genie().unwrap();
    let rep = simulate_replication(&e, 0, true).unwrap();
    let log = rep.log.unwrap();
    assert_eq!(log.len(), 4_000);
    let mut regret = 0.0;
    let mut non_opt = vec![0u64; genie.num_arms()];
    for &(ctx, arm) in &log {
        let Context::Discrete(i) = ctx else {
            panic!("continuous context")
        };
        regret += genie.gaps[i][arm];
        if arm != genie.h_star[i] {
            non_opt[arm] += 1;
        }
    }
    approx::assert_relative_eq!(regret, rep.regret[0], max_relative = 1e-12);
    assert_eq!(non_opt, rep.non_optimal_pulls[0]);
}

#[test]
fn continuous_regret_is_sum_of_gaps() {
    let e = exp(
        "energy-harvesting-k4",
        PolicySpec::Ccb {
            epsilon: 0.01,
            delta: 0.1,
        },
        3_000,
        1,
        5,
    )
    .with_checkpoints(vec![3_000]);
    let env = &e.environment;
    let rep = simulate_replication(&e, 0, true).unwrap();
    let mut regret = 0.0;
    for &(ctx, arm) in rep.log.as_ref().unwrap() {
        let Context::Continuous(y) = ctx else {
            panic!("discrete context")
        };
        let (best, value) = genie_arm_continuous(y, &env.arms, &env.reward);
        if best != arm {
            regret += (value - env.expected_reward(y, arm)).max(0.0);
        }
    }
    approx::assert_relative_eq!(regret, rep.regret[0], max_relative = 1e-12);
}

#[test]
fn oracle_has_zero_regret() {
    let t = run_experiment(&exp("channel-k4", PolicySpec::Oracle, 2_000, 2, 1)).unwrap();
    assert!(t.mean_regret.iter().all(|&r| r == 0.0));
    let t = run_experiment(&exp(
        "energy-harvesting-k4",
        PolicySpec::Oracle,
        2_000,
        2,
        1,
    ))
    .unwrap();
    assert!(t.mean_regret.iter().all(|&r| r == 0.0));
}

#[test]
fn zero_replications_rejected() {
    assert!(run_experiment(&exp(
        "channel-k7",
        PolicySpec::Dcb { epsilon: 0.01 },
        100,
        0,
        1
    ))
    .is_err());
    assert!(run_experiment(&exp(
        "channel-k7",
        PolicySpec::Dcb { epsilon: 0.01 },
        3,
        1,
        1
    ))
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_invariants(which in 0usize..6, seed in any::<u64>(), horizon in 7u64..1_500) {
        let (env, policy) = all_policies().swap_remove(which);
        let e = exp(env, policy, horizon, 1, seed);
        let rep = simulate_replication(&e, 0, false).unwrap();
        prop_assert_eq!(rep.regret.len(), e.checkpoints.len());
        prop_assert_eq!(*e.checkpoints.last().unwrap(), horizon);
        for w in rep.regret.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        for (c, &t) in e.checkpoints.iter().enumerate() {
            prop_assert!(rep.regret[c] >= 0.0);
            prop_assert_eq!(rep.pulls[c].iter().sum::<u64>(), t);
            for j in 0..rep.pulls[c].len() {
                prop_assert!(rep.non_optimal_pulls[c][j] <= rep.pulls[c][j]);
            }
        }
    }
}
