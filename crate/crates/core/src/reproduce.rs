//! Named reproduction runs: the two regret tables and the data behind the
//! three regret figures.

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

use crate::env::preset;
use crate::error::Result;
use crate::experiment::{run_experiment, Experiment, PolicySpec, RegretTrace};
use crate::policy::Ucb1Feedback;

pub const TABLE1_HORIZON: u64 = 100_000;
pub const TABLE1_REPLICATIONS: usize = 20;
pub const TABLE2_HORIZON: u64 = 1_000_000;
pub const TABLE2_REPLICATIONS: usize = 10;
pub const DEFAULT_SEED: u64 = 42;
pub const DCB_EPSILON: f64 = 0.01;

/// Published Table I cells, `(UCB1, Multi-UCB, DCB)` per environment.
pub const TABLE1_PUBLISHED: [(&str, [f64; 3]); 2] = [
    ("channel-k7", [17262.0, 4893.0, 1294.0]),
    ("channel-k4", [15688.0, 3278.0, 28.0]),
];

/// Published Table II cells for `alpha = 2/3, 1/2, 1/3`
/// (`delta = T^(alpha - 1)`): Multi-UCB, CCB with unknown horizon, CCB
/// with known horizon.
pub const TABLE2_PUBLISHED: [[f64; 3]; 3] = [
    [15535.8, 17583.9, 23117.2],
    [8645.7, 6533.0, 1476.2],
    [3010.5, 1163.4, 481.8],
];
pub const TABLE2_UCB1_PUBLISHED: f64 = 25201.5;
pub const TABLE2_ALPHAS: [f64; 3] = [2.0 / 3.0, 0.5, 1.0 / 3.0];

pub const ARTIFACTS: [&str; 5] = ["table1", "table2", "fig4", "fig5", "fig6"];

fn ucb1() -> PolicySpec {
    PolicySpec::Ucb1 {
        epsilon: 0.0,
        feedback: Ucb1Feedback::Value,
    }
}

/// The Multi-UCB baseline used in the tables and figures. Its confidence
/// term is scaled by each context's reward range, which amounts to running
/// each per-context UCB1 on rewards normalized to a unit range.
fn multi_ucb(delta: Option<f64>) -> PolicySpec {
    PolicySpec::MultiUcb {
        scaled_bonus: true,
        delta,
    }
}

fn dcb() -> PolicySpec {
    PolicySpec::Dcb {
        epsilon: DCB_EPSILON,
    }
}

/// `delta = T^(alpha - 1)`.
pub fn table2_delta(alpha: f64, horizon: u64) -> f64 {
    (horizon as f64).powf(alpha - 1.0)
}

/// One obtained cell next to its published value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub environment: String,
    pub policy: String,
    pub published: f64,
    pub mean: f64,
    pub stderr: f64,
}

impl Cell {
    /// `(mean - published) / published`.
    pub fn relative_error(&self) -> f64 {
        (self.mean - self.published) / self.published
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.relative_error().abs() <= tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub name: String,
    pub horizon: u64,
    pub replications: usize,
    pub seed: u64,
    pub cells: Vec<Cell>,
    /// Orderings from the published table that the obtained means break.
    pub violations: Vec<String>,
}

impl TableReport {
    pub fn cell(&self, environment: &str, policy: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.environment == environment && c.policy == policy)
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: T={} replications={} seed={}",
            self.name, self.horizon, self.replications, self.seed
        )?;
        writeln!(
            f,
            "{:<22} {:<32} {:>10} {:>12} {:>9} {:>8}",
            "environment", "policy", "published", "obtained", "stderr", "rel"
        )?;
        for c in &self.cells {
            writeln!(
                f,
                "{:<22} {:<32} {:>10.1} {:>12.1} {:>9.1} {:>+7.1}%",
                c.environment,
                c.policy,
                c.published,
                c.mean,
                c.stderr,
                100.0 * c.relative_error()
            )?;
        }
        if self.violations.is_empty() {
            write!(f, "ordering: consistent with the published table")
        } else {
            for v in &self.violations {
                writeln!(f, "ordering violated: {v}")?;
            }
            Ok(())
        }
    }
}

fn run_cell(
    env_name: &str,
    policy: PolicySpec,
    horizon: u64,
    reps: usize,
    seed: u64,
    published: f64,
) -> Result<(Cell, RegretTrace)> {
    let exp = Experiment::new(preset(env_name)?, policy, horizon, reps, seed)
        .with_checkpoints(vec![horizon]);
    let trace = run_experiment(&exp)?;
    let cell = Cell {
        environment: env_name.to_string(),
        policy: trace.label.clone(),
        published,
        mean: trace.final_regret(),
        stderr: trace.final_stderr(),
    };
    Ok((cell, trace))
}

fn require_less(violations: &mut Vec<String>, a: &Cell, b: &Cell) {
    if !(a.mean < b.mean) {
        violations.push(format!(
            "{}: {} ({:.1}) should be below {} ({:.1})",
            a.environment, a.policy, a.mean, b.policy, b.mean
        ));
    }
}

/// UCB1, Multi-UCB and DCB(0.01) on both channel-selection presets.
pub fn table1(reps: usize, seed: u64) -> Result<TableReport> {
    let mut cells = Vec::new();
    let mut violations = Vec::new();
    for (env_name, published) in TABLE1_PUBLISHED {
        let mut row = Vec::new();
        for (policy, p) in [ucb1(), multi_ucb(None), dcb()].into_iter().zip(published) {
            row.push(run_cell(env_name, policy, TABLE1_HORIZON, reps, seed, p)?.0);
        }
        require_less(&mut violations, &row[2], &row[1]);
        require_less(&mut violations, &row[1], &row[0]);
        cells.extend(row);
    }
    Ok(TableReport {
        name: "table1".into(),
        horizon: TABLE1_HORIZON,
        replications: reps,
        seed,
        cells,
        violations,
    })
}

/// Quantized Multi-UCB, CCB with the doubling trick and CCB tuned to the
/// horizon at three quantization widths, plus UCB1, on the
/// energy-harvesting preset.
pub fn table2(reps: usize, seed: u64) -> Result<TableReport> {
    let env_name = "energy-harvesting-k4";
    let t = TABLE2_HORIZON;
    let mut cells = Vec::new();
    let mut violations = Vec::new();
    let mut known = Vec::new();
    for (col, &alpha) in TABLE2_ALPHAS.iter().enumerate() {
        let delta = table2_delta(alpha, t);
        let specs = [
            multi_ucb(Some(delta)),
            PolicySpec::CcbDoubling {
                epsilon: DCB_EPSILON,
                alpha,
            },
            PolicySpec::Ccb {
                epsilon: DCB_EPSILON,
                delta,
            },
        ];
        let mut column = Vec::new();
        for (row, spec) in specs.into_iter().enumerate() {
            let published = TABLE2_PUBLISHED[row][col];
            column.push(run_cell(env_name, spec, t, reps, seed, published)?.0);
        }
        require_less(&mut violations, &column[2], &column[1]);
        require_less(&mut violations, &column[1], &column[0]);
        known.push(column[2].clone());
        cells.extend(column);
    }
    for w in known.windows(2) {
        require_less(&mut violations, &w[1], &w[0]);
    }
    let (ucb, _) = run_cell(env_name, ucb1(), t, reps, seed, TABLE2_UCB1_PUBLISHED)?;
    for c in &cells {
        require_less(&mut violations, c, &ucb);
    }
    cells.push(ucb);
    Ok(TableReport {
        name: "table2".into(),
        horizon: t,
        replications: reps,
        seed,
        cells,
        violations,
    })
}

/// How a figure normalizes the regret curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scale {
    /// `R(n) / ln n`
    Log,
    /// `R(n)`
    Raw,
    /// `R(n) / sqrt(n)`
    Sqrt,
}

impl Scale {
    pub fn apply(self, regret: f64, n: u64) -> f64 {
        let n = n as f64;
        match self {
            // ln 1 = 0; the first point carries no information either way
            Scale::Log if n <= 1.0 => 0.0,
            Scale::Log => regret / n.ln(),
            Scale::Raw => regret,
            Scale::Sqrt => regret / n.sqrt(),
        }
    }

    fn column(self) -> &'static str {
        match self {
            Scale::Log => "regret_over_ln_n",
            Scale::Raw => "regret",
            Scale::Sqrt => "regret_over_sqrt_n",
        }
    }
}

/// Curves for one figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure {
    pub name: String,
    pub environment: String,
    pub scale: Scale,
    pub traces: Vec<RegretTrace>,
}

impl Figure {
    /// Long-format CSV: one row per (policy, checkpoint).
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "policy,trial,mean_regret,stderr,{}",
            self.scale.column()
        )?;
        for tr in &self.traces {
            for (c, &t) in tr.checkpoints.iter().enumerate() {
                writeln!(
                    out,
                    "{},{t},{},{},{}",
                    tr.label,
                    tr.mean_regret[c],
                    tr.stderr_regret[c],
                    self.scale.apply(tr.mean_regret[c], t)
                )?;
            }
        }
        Ok(())
    }
}

pub fn default_replications(artifact: &str) -> usize {
    match artifact {
        "table2" | "fig6" => TABLE2_REPLICATIONS,
        _ => TABLE1_REPLICATIONS,
    }
}

/// `fig4`: channel-k7 regret over `ln n`; `fig5`: channel-k4 raw regret;
/// `fig6`: energy harvesting regret over `sqrt n` at `delta = 1/sqrt(T)`.
pub fn figure(name: &str, reps: usize, seed: u64) -> Result<Figure> {
    let (environment, scale, horizon, specs) = match name {
        "fig4" => (
            "channel-k7",
            Scale::Log,
            TABLE1_HORIZON,
            vec![ucb1(), multi_ucb(None), dcb()],
        ),
        "fig5" => (
            "channel-k4",
            Scale::Raw,
            TABLE1_HORIZON,
            vec![ucb1(), multi_ucb(None), dcb()],
        ),
        "fig6" => {
            let t = TABLE2_HORIZON;
            let delta = table2_delta(0.5, t);
            (
                "energy-harvesting-k4",
                Scale::Sqrt,
                t,
                vec![
                    ucb1(),
                    multi_ucb(Some(delta)),
                    PolicySpec::CcbDoubling {
                        epsilon: DCB_EPSILON,
                        alpha: 0.5,
                    },
                    PolicySpec::Ccb {
                        epsilon: DCB_EPSILON,
                        delta,
                    },
                ],
            )
        }
        other => return Err(crate::Error::UnknownArtifact(other.to_string())),
    };
    let env = preset(environment)?;
    let traces = specs
        .into_iter()
        .map(|spec| run_experiment(&Experiment::new(env.clone(), spec, horizon, reps, seed)))
        .collect::<Result<_>>()?;
    Ok(Figure {
        name: name.to_string(),
        environment: environment.to_string(),
        scale,
        traces,
    })
}
