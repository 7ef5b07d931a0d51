//! Experiment grid: cells, trials, seed derivation, and CSV traces.
//!
//! A grid is the cross product of dimension pairs, ridge weights, and
//! spectrum floors. Each cell runs `trials` independent instances, every
//! configured algorithm runs on the *same* instance within a trial, and
//! all seeds derive deterministically from one base seed, so a grid run
//! is reproducible byte for byte. Records carry `wall_ns = 0` for that
//! reason: timing varies across runs and machines, so it is reported on
//! stderr by the command-line layer instead of inside the data.
//!
//! With the `parallel` feature (on by default) the (cell, trial) tasks
//! run on a rayon pool; the fallback is a plain sequential loop. Both
//! produce records in identical order.

use crate::problems::{self, ProblemError};
use crate::solvers::{IzInit, SolverError, SolverKind, SolverState};
use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("aggregation over ragged trials: {0}")]
    Ragged(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Which error metrics a run computes. Metrics cost a matrix pass per
/// trace record, so heavy grids can switch the unused ones off;
/// unrequested float metrics serialize as `NaN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSet {
    /// `|beta - beta*|`.
    pub err_beta: bool,
    /// Normal-equation residual `|X^T X beta - X^T y|`.
    pub err_normal: bool,
    /// Error in the solver's own contraction norm; coincides with
    /// `err_beta` for kinds without a weighted guarantee.
    pub err_weighted: bool,
    /// Cumulative count of steps below the noop threshold.
    pub noop_count: bool,
}

impl MetricSet {
    pub fn all() -> MetricSet {
        MetricSet {
            err_beta: true,
            err_normal: true,
            err_weighted: true,
            noop_count: true,
        }
    }

    pub fn none() -> MetricSet {
        MetricSet {
            err_beta: false,
            err_normal: false,
            err_weighted: false,
            noop_count: false,
        }
    }

    pub fn parse_list(list: &str) -> Result<MetricSet, String> {
        let mut set = MetricSet::none();
        for raw in list.split(',') {
            match raw.trim() {
                "err_beta" => set.err_beta = true,
                "err_normal" => set.err_normal = true,
                "err_weighted" => set.err_weighted = true,
                "noop_count" => set.noop_count = true,
                other => {
                    return Err(format!(
                        "unknown metric '{}'; valid: err_beta, err_normal, err_weighted, noop_count",
                        other
                    ))
                }
            }
        }
        Ok(set)
    }
}

/// One solver entry of a grid: the kind plus, for the augmented solver,
/// its starting point. Serialized as `rk-ridge` or `iz:iz0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgorithmSpec {
    pub kind: SolverKind,
    pub iz_init: Option<IzInit>,
}

impl AlgorithmSpec {
    pub fn new(kind: SolverKind, iz_init: Option<IzInit>) -> Result<AlgorithmSpec, String> {
        match (kind, iz_init) {
            (SolverKind::Iz, None) => Err("iz requires an init, e.g. iz:iz0".into()),
            (SolverKind::Iz, Some(_)) => Ok(AlgorithmSpec { kind, iz_init }),
            (_, Some(_)) => Err(format!("{} does not take an init suffix", kind)),
            (_, None) => Ok(AlgorithmSpec { kind, iz_init: None }),
        }
    }

    pub fn parse(s: &str) -> Result<AlgorithmSpec, String> {
        let unknown = |name: &str| {
            format!(
                "unknown algorithm '{}'; valid: rk, rgs, rk-ridge, rgs-ridge, naive-rk, naive-rgs, iz",
                name
            )
        };
        match s.split_once(':') {
            Some((kind, init)) => {
                let kind = SolverKind::parse(kind.trim()).ok_or_else(|| unknown(kind.trim()))?;
                let init = IzInit::parse(init.trim()).ok_or_else(|| {
                    format!(
                        "unknown iz init '{}'; valid: iz0, iz1, izmix, izrnd",
                        init.trim()
                    )
                })?;
                AlgorithmSpec::new(kind, Some(init))
            }
            None => {
                let kind = SolverKind::parse(s.trim()).ok_or_else(|| unknown(s.trim()))?;
                AlgorithmSpec::new(kind, None)
            }
        }
    }
}

impl std::fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.iz_init {
            Some(init) => write!(f, "{}:{}", self.kind, init),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// One traced measurement of one solver run.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub algorithm: SolverKind,
    pub iz_init: Option<IzInit>,
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub sigma_min: f64,
    pub trial: u64,
    pub iteration: u64,
    pub err_beta: f64,
    pub err_normal: f64,
    pub err_weighted: f64,
    /// `None` when the metric was not requested; serializes as `NaN`.
    pub noop_count: Option<u64>,
    /// Pinned to zero in serialized records to keep reruns byte-identical.
    pub wall_ns: u64,
}

pub const CSV_HEADER: &str =
    "algorithm,iz_init,m,n,lambda,sigma_min,trial,iteration,err_beta,err_normal,err_weighted,noop_count,wall_ns";

/// Decimal scientific with 17 significant digits: enough to round-trip
/// any f64 exactly. `NaN` stays `NaN`.
fn fmt_float(v: f64) -> String {
    format!("{:.16e}", v)
}

impl TraceRecord {
    pub fn csv_row(&self) -> String {
        let init = self.iz_init.map(IzInit::name).unwrap_or("");
        let noop = match self.noop_count {
            Some(c) => c.to_string(),
            None => "NaN".into(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            init,
            self.m,
            self.n,
            fmt_float(self.lambda),
            fmt_float(self.sigma_min),
            self.trial,
            self.iteration,
            fmt_float(self.err_beta),
            fmt_float(self.err_normal),
            fmt_float(self.err_weighted),
            noop,
            self.wall_ns
        )
    }
}

/// Writes the header and one row per record.
pub fn write_csv<W: Write>(records: &[TraceRecord], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{}", CSV_HEADER)?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Full description of a grid experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dims: Vec<(usize, usize)>,
    pub lambdas: Vec<f64>,
    pub sigma_mins: Vec<f64>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub iterations: u64,
    pub trace_every: u64,
    pub trials: u64,
    pub base_seed: u64,
    pub metrics: MetricSet,
}

impl Default for ExperimentConfig {
    /// The reference grid: square, tall, and wide thousand-scale shapes,
    /// three ridge weights, four spectrum floors, twenty trials of the
    /// two ridge solvers and all four augmented starts.
    fn default() -> ExperimentConfig {
        let iz = |init| AlgorithmSpec {
            kind: SolverKind::Iz,
            iz_init: Some(init),
        };
        ExperimentConfig {
            dims: vec![(1000, 1000), (10_000, 100), (100, 10_000)],
            lambdas: vec![1e-3, 1e-2, 1e-1],
            sigma_mins: vec![1.0, 0.1, 0.01, 0.001],
            algorithms: vec![
                AlgorithmSpec {
                    kind: SolverKind::RkRidge,
                    iz_init: None,
                },
                AlgorithmSpec {
                    kind: SolverKind::RgsRidge,
                    iz_init: None,
                },
                iz(IzInit::Zero),
                iz(IzInit::ScaledObservations),
                iz(IzInit::Mixed),
                iz(IzInit::Random),
            ],
            iterations: 10_000,
            trace_every: 100,
            trials: 20,
            base_seed: 0,
            metrics: MetricSet::all(),
        }
    }
}

impl ExperimentConfig {
    /// Parses `key = value` lines. `#` starts a comment, blank lines are
    /// skipped, keys may appear at most once, and any key not given keeps
    /// its default. Lists are comma separated; dimensions are `MxN`.
    pub fn parse(text: &str) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| HarnessError::Config {
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(format!("key '{}' has an empty value", key)));
            }
            if seen.iter().any(|k| k == key) {
                return Err(err(format!("duplicate key '{}'", key)));
            }
            seen.push(key.to_string());

            let items = || value.split(',').map(str::trim);
            match key {
                "dims" => {
                    let mut dims = Vec::new();
                    for item in items() {
                        let (m, n) = item
                            .split_once('x')
                            .ok_or_else(|| err(format!("dimension '{}' is not MxN", item)))?;
                        let parse = |s: &str| {
                            s.trim()
                                .parse::<usize>()
                                .map_err(|e| err(format!("dimension '{}': {}", item, e)))
                        };
                        dims.push((parse(m)?, parse(n)?));
                    }
                    cfg.dims = dims;
                }
                "lambda" => {
                    cfg.lambdas = items()
                        .map(|s| {
                            s.parse::<f64>()
                                .map_err(|e| err(format!("lambda '{}': {}", s, e)))
                        })
                        .collect::<Result<_, _>>()?;
                }
                "sigma_min" => {
                    cfg.sigma_mins = items()
                        .map(|s| {
                            s.parse::<f64>()
                                .map_err(|e| err(format!("sigma_min '{}': {}", s, e)))
                        })
                        .collect::<Result<_, _>>()?;
                }
                "algorithms" => {
                    cfg.algorithms = items()
                        .map(|s| AlgorithmSpec::parse(s).map_err(err))
                        .collect::<Result<_, _>>()?;
                }
                "iterations" => {
                    cfg.iterations = value.parse().map_err(|e| err(format!("{}", e)))?;
                }
                "trace_every" => {
                    cfg.trace_every = value.parse().map_err(|e| err(format!("{}", e)))?;
                }
                "trials" => {
                    cfg.trials = value.parse().map_err(|e| err(format!("{}", e)))?;
                }
                "seed" => {
                    cfg.base_seed = value.parse().map_err(|e| err(format!("{}", e)))?;
                }
                "metrics" => {
                    cfg.metrics = MetricSet::parse_list(value).map_err(err)?;
                }
                other => return Err(err(format!("unknown key '{}'", other))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let inv = |m: String| HarnessError::Invalid(m);
        if self.dims.is_empty() {
            return Err(inv("no dimensions configured".into()));
        }
        if self.dims.iter().any(|&(m, n)| m == 0 || n == 0) {
            return Err(inv("dimensions must be at least 1x1".into()));
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(inv("lambda values must be finite and nonnegative".into()));
        }
        if self.sigma_mins.is_empty()
            || self
                .sigma_mins
                .iter()
                .any(|s| !(*s > 0.0 && *s <= 1.0))
        {
            return Err(inv("sigma-min must be in (0,1]".into()));
        }
        if self.algorithms.is_empty() {
            return Err(inv("no algorithms configured".into()));
        }
        if self
            .algorithms
            .iter()
            .any(|a| (a.kind == SolverKind::Iz) != a.iz_init.is_some())
        {
            return Err(inv("iz entries need an init and only iz entries take one".into()));
        }
        if self.iterations == 0 {
            return Err(inv("iterations must be at least 1".into()));
        }
        if self.trace_every == 0 || self.trace_every > self.iterations {
            return Err(inv("trace_every must be in 1..=iterations".into()));
        }
        if self.trials == 0 {
            return Err(inv("trials must be at least 1".into()));
        }
        if self
            .algorithms
            .iter()
            .any(|a| a.kind == SolverKind::Iz)
            && self.lambdas.iter().any(|l| *l == 0.0)
        {
            return Err(inv("iz entries cannot run at lambda = 0".into()));
        }
        Ok(())
    }

    /// Cells times trials times algorithms times records per run.
    pub fn expected_record_count(&self) -> u64 {
        let cells = (self.dims.len() * self.lambdas.len() * self.sigma_mins.len()) as u64;
        let per_run = self.iterations / self.trace_every + 1;
        cells * self.trials * self.algorithms.len() as u64 * per_run
    }
}

/// Seed of the problem instance for one (cell, trial): the cell's
/// parameters are folded into a label hash so each cell gets an
/// independent, reproducible stream.
pub fn instance_seed(
    base_seed: u64,
    m: usize,
    n: usize,
    lambda: f64,
    sigma_min: f64,
    trial: u64,
) -> u64 {
    let label = format!(
        "m={};n={};lambda={};sigma_min={};trial={}",
        m, n, lambda, sigma_min, trial
    );
    linalg_mix(base_seed, &label)
}

/// Seed of one algorithm's selection stream on one instance. Derived from
/// the instance seed so algorithms share the instance but draw
/// independently.
pub fn solver_seed(instance_seed: u64, algorithm: &AlgorithmSpec) -> u64 {
    linalg_mix(instance_seed, &format!("alg={}", algorithm))
}

fn linalg_mix(seed: u64, label: &str) -> u64 {
    crate::linalg::splitmix64(seed ^ crate::linalg::fnv1a64(label.as_bytes()))
}

/// Everything a grid run produced.
pub struct GridRun {
    pub records: Vec<TraceRecord>,
    pub cells: u64,
    pub tasks: u64,
    pub wall: Duration,
}

type GridTask = (usize, usize, f64, f64, u64);

fn grid_tasks(config: &ExperimentConfig) -> Vec<GridTask> {
    let mut tasks = Vec::new();
    for &(m, n) in &config.dims {
        for &lambda in &config.lambdas {
            for &sigma_min in &config.sigma_mins {
                for trial in 0..config.trials {
                    tasks.push((m, n, lambda, sigma_min, trial));
                }
            }
        }
    }
    tasks
}

/// Generates one task's instance and runs every configured algorithm on
/// it, in configuration order.
fn grid_task_records(
    config: &ExperimentConfig,
    &(m, n, lambda, sigma_min, trial): &GridTask,
) -> Result<Vec<TraceRecord>, HarnessError> {
    let iseed = instance_seed(config.base_seed, m, n, lambda, sigma_min, trial);
    let problem = problems::generate(m, n, sigma_min, lambda, iseed)?;
    let mut records = Vec::new();
    for alg in &config.algorithms {
        let sseed = solver_seed(iseed, alg);
        let mut state = SolverState::init(alg.kind, &problem, alg.iz_init, sseed)?;
        records.extend(state.run(
            &problem,
            config.iterations,
            config.trace_every,
            config.metrics,
            trial,
        ));
    }
    Ok(records)
}

fn finish_grid(
    config: &ExperimentConfig,
    task_count: usize,
    results: Vec<Result<Vec<TraceRecord>, HarnessError>>,
    start: Instant,
) -> Result<GridRun, HarnessError> {
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    Ok(GridRun {
        records,
        cells: (config.dims.len() * config.lambdas.len() * config.sigma_mins.len()) as u64,
        tasks: task_count as u64,
        wall: start.elapsed(),
    })
}

/// Runs the whole grid and collects every trace record in deterministic
/// order: dims, then lambda, then sigma-min, then trial, then algorithm.
/// Tasks run data-parallel when the `parallel` feature is on; the record
/// order (and thus the CSV bytes) is identical either way.
pub fn run_grid(config: &ExperimentConfig) -> Result<GridRun, HarnessError> {
    config.validate()?;
    let start = Instant::now();
    let tasks = grid_tasks(config);
    #[cfg(feature = "parallel")]
    let results: Vec<Result<Vec<TraceRecord>, HarnessError>> = tasks
        .par_iter()
        .map(|t| grid_task_records(config, t))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<Vec<TraceRecord>, HarnessError>> =
        tasks.iter().map(|t| grid_task_records(config, t)).collect();
    finish_grid(config, tasks.len(), results, start)
}

/// Same grid on one thread regardless of the `parallel` feature. Exists
/// so the benchmark suite can compare the two schedules in one build.
pub fn run_grid_sequential(config: &ExperimentConfig) -> Result<GridRun, HarnessError> {
    config.validate()?;
    let start = Instant::now();
    let tasks = grid_tasks(config);
    let results: Vec<Result<Vec<TraceRecord>, HarnessError>> =
        tasks.iter().map(|t| grid_task_records(config, t)).collect();
    finish_grid(config, tasks.len(), results, start)
}

/// How to combine a metric across trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateStat {
    Mean,
    Median,
}

/// One metric row aggregated across trials of a (cell, algorithm,
/// iteration) group.
#[derive(Debug, Clone)]
pub struct AggregateRecord {
    pub algorithm: SolverKind,
    pub iz_init: Option<IzInit>,
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub sigma_min: f64,
    pub iteration: u64,
    pub trials: u64,
    pub err_beta: f64,
    pub err_normal: f64,
    pub err_weighted: f64,
    pub noop_count: f64,
}

fn combine(values: &mut Vec<f64>, stat: AggregateStat) -> f64 {
    if values.iter().any(|v| v.is_nan()) {
        return f64::NAN;
    }
    match stat {
        AggregateStat::Mean => values.iter().sum::<f64>() / values.len() as f64,
        AggregateStat::Median => {
            values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN after the guard"));
            let mid = values.len() / 2;
            if values.len() % 2 == 1 {
                values[mid]
            } else {
                0.5 * (values[mid - 1] + values[mid])
            }
        }
    }
}

/// Aggregates records across trials. Every (cell, algorithm, iteration)
/// group must contain the same number of trials; ragged inputs are an
/// error rather than a silently skewed average.
pub fn aggregate(
    records: &[TraceRecord],
    stat: AggregateStat,
) -> Result<Vec<AggregateRecord>, HarnessError> {
    type Key = (usize, usize, u64, u64, u8, u8, u64);
    let kind_tag = |k: SolverKind| SolverKind::ALL.iter().position(|x| *x == k).unwrap() as u8;
    let init_tag = |i: Option<IzInit>| match i {
        None => u8::MAX,
        Some(v) => IzInit::ALL.iter().position(|x| *x == v).unwrap() as u8,
    };

    let mut groups: BTreeMap<Key, (TraceRecord, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> =
        BTreeMap::new();
    for r in records {
        let key = (
            r.m,
            r.n,
            r.lambda.to_bits(),
            r.sigma_min.to_bits(),
            kind_tag(r.algorithm),
            init_tag(r.iz_init),
            r.iteration,
        );
        let entry = groups
            .entry(key)
            .or_insert_with(|| (r.clone(), Vec::new(), Vec::new(), Vec::new(), Vec::new()));
        entry.1.push(r.err_beta);
        entry.2.push(r.err_normal);
        entry.3.push(r.err_weighted);
        entry.4.push(r.noop_count.map_or(f64::NAN, |c| c as f64));
    }

    let sizes: Vec<usize> = groups.values().map(|g| g.1.len()).collect();
    if let (Some(&min), Some(&max)) = (sizes.iter().min(), sizes.iter().max()) {
        if min != max {
            return Err(HarnessError::Ragged(format!(
                "group trial counts range from {} to {}",
                min, max
            )));
        }
    }

    Ok(groups
        .into_values()
        .map(|(proto, mut eb, mut en, mut ew, mut nc)| AggregateRecord {
            algorithm: proto.algorithm,
            iz_init: proto.iz_init,
            m: proto.m,
            n: proto.n,
            lambda: proto.lambda,
            sigma_min: proto.sigma_min,
            iteration: proto.iteration,
            trials: eb.len() as u64,
            err_beta: combine(&mut eb, stat),
            err_normal: combine(&mut en, stat),
            err_weighted: combine(&mut ew, stat),
            noop_count: combine(&mut nc, stat),
        })
        .collect())
}
