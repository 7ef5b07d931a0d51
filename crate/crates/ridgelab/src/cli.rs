//! Command-line front end.
//!
//! Five subcommands: `gen` writes an instance directory, `solve` traces
//! one solver on one instance, `bench` runs a whole experiment grid,
//! `rates` prints the closed-form factors, and `verify` runs the
//! theory/solver consistency suite.
//!
//! Exit codes: 0 success, 1 file or data errors, 2 usage errors, 3 failed
//! verification checks. CSV always goes to the chosen file or stdout;
//! wall-clock chatter stays on stderr so captured output is reproducible.

use crate::harness::{self, ExperimentConfig, MetricSet};
use crate::linalg;
use crate::problems::{self, ProblemError, ProblemInstance};
use crate::solvers::{IzInit, SolverError, SolverKind, SolverState};
use crate::theory::{self, NormMatrix, Regime};
use crate::verify;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "ridgelab",
    version,
    about = "Randomized row- and column-action solvers for ridge regression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance directory
    Gen(GenArgs),
    /// Run one solver on one instance and trace error metrics to CSV
    Solve(SolveArgs),
    /// Run an experiment grid and emit one CSV of trace records
    Bench(BenchArgs),
    /// Print closed-form contraction factors for an instance
    Rates(RatesArgs),
    /// Run the deterministic consistency suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Rows of X
    #[arg(long)]
    m: usize,
    /// Columns of X
    #[arg(long)]
    n: usize,
    /// Smallest singular value, in (0,1]
    #[arg(long = "sigma-min")]
    sigma_min: f64,
    /// Ridge weight, nonnegative
    #[arg(long)]
    lambda: f64,
    /// Generation seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

/// Where a command gets its problem instance: a saved directory, or
/// inline generation from the four instance parameters.
#[derive(Args)]
struct SourceArgs {
    /// Instance directory written by `gen`
    #[arg(long = "in", value_name = "DIR")]
    input: Option<PathBuf>,
    /// Rows of X (inline generation)
    #[arg(long)]
    m: Option<usize>,
    /// Columns of X (inline generation)
    #[arg(long)]
    n: Option<usize>,
    /// Smallest singular value (inline generation)
    #[arg(long = "sigma-min")]
    sigma_min: Option<f64>,
    /// Ridge weight (inline generation)
    #[arg(long)]
    lambda: Option<f64>,
    /// Seed for inline generation
    #[arg(long = "gen-seed", default_value_t = 0)]
    gen_seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Solver: rk, rgs, rk-ridge, rgs-ridge, naive-rk, naive-rgs, iz
    #[arg(long)]
    alg: String,
    /// Starting point for iz: iz0, iz1, izmix, izrnd
    #[arg(long = "iz-init")]
    iz_init: Option<String>,
    /// Step budget
    #[arg(long, default_value_t = 10_000)]
    iters: u64,
    /// Record metrics every this many steps
    #[arg(long = "trace-every", default_value_t = 100)]
    trace_every: u64,
    /// Seed of the solver's selection stream
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Metrics to compute (comma list; default all)
    #[arg(long)]
    metrics: Option<String>,
    /// Steps between full recomputations of cached state
    #[arg(long = "refresh-every")]
    refresh_every: Option<u64>,
    /// CSV output path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid config file of key = value lines (reference grid when omitted)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// CSV output path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatesArgs {
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Identity checks only (the default)
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    /// Add the empirical crossover checks
    #[arg(long)]
    full: bool,
}

#[derive(Debug)]
enum CliError {
    /// File and data problems: exit 1.
    Io(String),
    /// Bad flags or parameter validation: exit 2.
    Usage(String),
    /// Consistency checks failed: exit 3.
    Verification(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Usage(m) | CliError::Verification(m) => m,
        }
    }
}

fn map_problem(e: ProblemError) -> CliError {
    match e {
        ProblemError::InvalidParameter(m) => CliError::Usage(m),
        other => CliError::Io(other.to_string()),
    }
}

fn map_solver(e: SolverError) -> CliError {
    CliError::Usage(e.to_string())
}

fn map_harness(e: harness::HarnessError) -> CliError {
    match e {
        harness::HarnessError::Config { .. } | harness::HarnessError::Invalid(_) => {
            CliError::Usage(e.to_string())
        }
        harness::HarnessError::Problem(p) => map_problem(p),
        harness::HarnessError::Solver(s) => map_solver(s),
        harness::HarnessError::Ragged(_) => CliError::Usage(e.to_string()),
        harness::HarnessError::Io(io) => CliError::Io(io.to_string()),
    }
}

impl SourceArgs {
    fn resolve(&self) -> Result<ProblemInstance, CliError> {
        match (&self.input, self.m, self.n, self.sigma_min, self.lambda) {
            (Some(dir), None, None, None, None) => {
                ProblemInstance::load(dir).map_err(map_problem)
            }
            (Some(_), ..) => Err(CliError::Usage(
                "--in conflicts with the inline generator flags".into(),
            )),
            (None, Some(m), Some(n), Some(sigma_min), Some(lambda)) => {
                problems::generate(m, n, sigma_min, lambda, self.gen_seed).map_err(map_problem)
            }
            (None, ..) => Err(CliError::Usage(
                "provide --in DIR or all of --m, --n, --sigma-min, --lambda".into(),
            )),
        }
    }
}

/// Parses and runs one invocation, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Rates(a) => cmd_rates(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn spectrum_line(k: usize, sigma_min: f64) -> String {
    let mut ladder = problems::prescribed_spectrum(k, sigma_min);
    ladder.reverse();
    let fmt = |v: &f64| v.to_string();
    if k <= 12 {
        ladder.iter().map(fmt).collect::<Vec<_>>().join(" ")
    } else {
        format!(
            "{} .. {} ({} values, geometric)",
            ladder[..3].iter().map(fmt).collect::<Vec<_>>().join(" "),
            ladder[k - 3..].iter().map(fmt).collect::<Vec<_>>().join(" "),
            k
        )
    }
}

fn cmd_gen(a: GenArgs) -> Result<(), CliError> {
    let p = problems::generate(a.m, a.n, a.sigma_min, a.lambda, a.seed).map_err(map_problem)?;
    p.save(&a.out).map_err(map_problem)?;

    let x = &p.x;
    let mut primal = x.matvec_t(&x.matvec(&p.oracle.beta_star));
    primal.axpy(p.lambda, &p.oracle.beta_star);
    let primal_res = primal.sub(&x.matvec_t(&p.y)).norm();
    let mut dual = x.matvec(&x.matvec_t(&p.oracle.alpha_star));
    dual.axpy(p.lambda, &p.oracle.alpha_star);
    let dual_res = dual.sub(&p.y).norm();
    let gap = p.oracle.beta_star.sub(&x.matvec_t(&p.oracle.alpha_star)).norm();

    println!("instance {}x{} written to {}", a.m, a.n, a.out.display());
    println!("spectrum: {}", spectrum_line(a.m.min(a.n), a.sigma_min));
    println!("primal residual: {:.3e}", primal_res);
    println!("dual residual: {:.3e}", dual_res);
    println!("duality gap: {:.3e}", gap);
    Ok(())
}

fn parse_algorithm(alg: &str, iz_init: Option<&str>) -> Result<(SolverKind, Option<IzInit>), CliError> {
    let kind = SolverKind::parse(alg).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown algorithm '{}'; valid: rk, rgs, rk-ridge, rgs-ridge, naive-rk, naive-rgs, iz",
            alg
        ))
    })?;
    let init = match iz_init {
        Some(s) => Some(IzInit::parse(s).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown iz init '{}'; valid: iz0, iz1, izmix, izrnd",
                s
            ))
        })?),
        None => None,
    };
    match (kind, init) {
        (SolverKind::Iz, None) => Err(CliError::Usage("iz requires --iz-init".into())),
        (SolverKind::Iz, init) => Ok((kind, init)),
        (_, Some(_)) => Err(CliError::Usage("--iz-init applies only to iz".into())),
        (_, None) => Ok((kind, None)),
    }
}

fn write_records(
    records: &[harness::TraceRecord],
    path: Option<&PathBuf>,
) -> Result<(), CliError> {
    match path {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| CliError::Io(format!("cannot create {}: {}", path.display(), e)))?;
            let mut w = std::io::BufWriter::new(file);
            harness::write_csv(records, &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::Io(format!("writing {}: {}", path.display(), e)))
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = std::io::BufWriter::new(stdout.lock());
            harness::write_csv(records, &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::Io(format!("writing to stdout: {}", e)))
        }
    }
}

fn cmd_solve(a: SolveArgs) -> Result<(), CliError> {
    let (kind, iz_init) = parse_algorithm(&a.alg, a.iz_init.as_deref())?;
    if a.iters == 0 {
        return Err(CliError::Usage("--iters must be at least 1".into()));
    }
    if a.trace_every == 0 || a.trace_every > a.iters {
        return Err(CliError::Usage(
            "--trace-every must be in 1..=--iters".into(),
        ));
    }
    let metrics = match a.metrics.as_deref() {
        Some(list) => MetricSet::parse_list(list).map_err(CliError::Usage)?,
        None => MetricSet::all(),
    };
    let problem = a.source.resolve()?;
    let mut state = SolverState::init(kind, &problem, iz_init, a.seed).map_err(map_solver)?;
    if let Some(every) = a.refresh_every {
        if every == 0 {
            return Err(CliError::Usage("--refresh-every must be at least 1".into()));
        }
        state.set_refresh_interval(every);
    }
    let records = state.run(&problem, a.iters, a.trace_every, metrics, 0);
    write_records(&records, a.csv.as_ref())?;
    if a.csv.is_some() {
        println!(
            "wrote {} records to {}",
            records.len(),
            a.csv.as_ref().expect("path present").display()
        );
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), CliError> {
    let config = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {}", path.display(), e)))?;
            ExperimentConfig::parse(&text).map_err(map_harness)?
        }
        None => ExperimentConfig::default(),
    };
    let run = harness::run_grid(&config).map_err(map_harness)?;
    write_records(&run.records, a.out.as_ref())?;
    eprintln!(
        "grid: {} cells, {} tasks, {} records, wall {:.1}s",
        run.cells,
        run.tasks,
        run.records.len(),
        run.wall.as_secs_f64()
    );
    Ok(())
}

fn regime_label(r: Regime) -> &'static str {
    match r {
        Regime::OverDetermined => "over-determined",
        Regime::UnderDetermined => "under-determined",
        Regime::Square => "square",
    }
}

fn norm_label(n: NormMatrix) -> &'static str {
    match n {
        NormMatrix::KPrime => "k-prime",
        NormMatrix::SigmaPrime => "sigma-prime",
        NormMatrix::Euclidean => "euclidean",
        NormMatrix::XGram => "gram",
    }
}

fn cmd_rates(a: RatesArgs) -> Result<(), CliError> {
    let p = a.source.resolve()?;
    let (m, n) = (p.x.rows(), p.x.cols());
    let spectrum =
        linalg::singular_values(&p.x).map_err(|e| CliError::Usage(e.to_string()))?;

    println!(
        "instance: {}x{}, lambda = {}, sigma-min = {}",
        m, n, p.lambda, p.sigma_min
    );
    let mut regime = None;
    for kind in [
        SolverKind::PlainRk,
        SolverKind::PlainRgs,
        SolverKind::RkRidge,
        SolverKind::RgsRidge,
        SolverKind::NaiveRkNormal,
        SolverKind::NaiveRgsNormal,
    ] {
        let bound = theory::contraction_factor(kind, m, n, &spectrum, p.lambda)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        regime.get_or_insert(bound.regime);
        println!(
            "{:<10} factor {:.12} ({} norm)",
            kind.name(),
            bound.factor,
            norm_label(bound.norm)
        );
    }
    if let Some(r) = regime {
        println!("regime: {}", regime_label(r));
    }
    if p.lambda > 0.0 {
        match theory::iz_condition_check(&p.x, p.lambda) {
            Ok((cond_a, cond_g)) => {
                println!(
                    "iz         cond(augmented) {:.6e}, sqrt cond(gram) {:.6e}",
                    cond_a,
                    cond_g.sqrt()
                );
            }
            Err(e) => println!("iz         condition check unavailable: {}", e),
        }
    } else {
        println!("iz         requires lambda > 0");
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), CliError> {
    let _ = a.quick;
    let outcomes = verify::run_suite(a.full);
    let mut failures = 0usize;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{} {} ({})", tag, o.name, o.detail);
        if !o.passed {
            failures += 1;
        }
    }
    println!(
        "{} of {} checks passed",
        outcomes.len() - failures,
        outcomes.len()
    );
    if failures > 0 {
        return Err(CliError::Verification(format!(
            "{} of {} checks failed",
            failures,
            outcomes.len()
        )));
    }
    Ok(())
}
