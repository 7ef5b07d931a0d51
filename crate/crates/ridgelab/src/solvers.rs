//! Randomized row- and column-action solvers for ridge regression.
//!
//! Seven solvers share one state machine. The plain row solver projects
//! onto rows of `X`; the plain column solver does coordinate descent on
//! columns. Their ridge variants work on the regularized pair: the row
//! form updates a dual iterate `alpha` with mirror `beta = X^T alpha`, the
//! column form updates `beta` directly against a cached residual. The
//! naive variants run the plain methods verbatim on the formed normal
//! system `(X^T X + lambda I, X^T y)`, which squares the conditioning and
//! exists here as the baseline the regularized methods are measured
//! against. The augmented solver interleaves row and column actions on the
//! symmetric system `[[sqrt(l) I, X], [X^T, -sqrt(l) I]]` and carries both
//! a scaled dual vector `alpha'` and a primal vector `beta`.
//!
//! Every step touches one row or one column, so per-step cost is `O(n)`
//! for row actions, `O(m)` for column actions, never `O(m n)`; the
//! `scalars_touched` counter makes that measurable. Derived quantities
//! (mirror, residual caches, iterate norms) are maintained incrementally
//! and refreshed from scratch on a configurable interval to stop drift on
//! very long runs.

use crate::harness::{MetricSet, TraceRecord};
use crate::linalg::{DenseMatrix, DenseVector, LinAlgError, SeededRng, WeightedSampler};
use crate::problems::ProblemInstance;
use crate::theory;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Which solver a state runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    /// Row projections on `(X, y)`; ignores `lambda`.
    PlainRk,
    /// Column coordinate descent on `(X, y)`; ignores `lambda`.
    PlainRgs,
    /// Dual row solver for the ridge problem.
    RkRidge,
    /// Primal column solver for the ridge problem.
    RgsRidge,
    /// Plain row solver on the formed normal system.
    NaiveRkNormal,
    /// Plain column solver on the formed normal system.
    NaiveRgsNormal,
    /// Augmented row-plus-column solver; requires `lambda > 0` and an
    /// initialization choice.
    Iz,
}

impl SolverKind {
    pub const ALL: [SolverKind; 7] = [
        SolverKind::PlainRk,
        SolverKind::PlainRgs,
        SolverKind::RkRidge,
        SolverKind::RgsRidge,
        SolverKind::NaiveRkNormal,
        SolverKind::NaiveRgsNormal,
        SolverKind::Iz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::PlainRk => "rk",
            SolverKind::PlainRgs => "rgs",
            SolverKind::RkRidge => "rk-ridge",
            SolverKind::RgsRidge => "rgs-ridge",
            SolverKind::NaiveRkNormal => "naive-rk",
            SolverKind::NaiveRgsNormal => "naive-rgs",
            SolverKind::Iz => "iz",
        }
    }

    pub fn parse(s: &str) -> Option<SolverKind> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Starting point of the augmented solver.
///
/// The solver's long-run behavior depends strongly on where it starts:
/// from all zeros every column action is a noop, from `alpha' = y /
/// sqrt(lambda)` every row action is a noop, and the mixed and random
/// starts break both closures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IzInit {
    /// `alpha' = 0`, `beta = 0`.
    Zero,
    /// `alpha' = y / sqrt(lambda)`, `beta = 0`.
    ScaledObservations,
    /// `alpha' = y / (2 sqrt(lambda))`, `beta = 0`.
    Mixed,
    /// Both vectors drawn from the standard normal, `alpha'` first.
    Random,
}

impl IzInit {
    pub const ALL: [IzInit; 4] = [
        IzInit::Zero,
        IzInit::ScaledObservations,
        IzInit::Mixed,
        IzInit::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IzInit::Zero => "iz0",
            IzInit::ScaledObservations => "iz1",
            IzInit::Mixed => "izmix",
            IzInit::Random => "izrnd",
        }
    }

    pub fn parse(s: &str) -> Option<IzInit> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for IzInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One action the state machine can take: project on a row or a column of
/// the iterated system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepChoice {
    Row(usize),
    Column(usize),
}

/// What a single step did.
#[derive(Debug, Clone, Copy)]
pub struct StepReport {
    pub choice: StepChoice,
    /// Euclidean norm of the change applied to the solver's own iterate
    /// vector(s): `|delta|` for a single-coordinate update, scaled by the
    /// touched row or column norm when a whole vector moves.
    pub delta_magnitude: f64,
    /// True when the step moved the iterate by at most
    /// `1e-14 * (1 + scale)`, with `scale` the iterate norm before the
    /// step. Noop steps still consume a draw and count toward the budget.
    pub was_noop: bool,
}

/// Relative threshold under which a step counts as a noop.
pub const NOOP_RELATIVE_TOL: f64 = 1e-14;

/// Steps between full recomputations of the mirror, residual cache, and
/// iterate norms.
pub const DEFAULT_REFRESH_INTERVAL: u64 = 1_000_000;

struct NaiveSystem {
    matrix: DenseMatrix,
    rhs: DenseVector,
}

/// Mutable state of one solver on one problem instance.
///
/// The `x` and `y` the state was initialized with must be passed to every
/// step via the same [`ProblemInstance`]; the naive kinds consult only the
/// normal system formed at init time.
pub struct SolverState {
    kind: SolverKind,
    iz_init: Option<IzInit>,
    lambda: f64,
    sqrt_lambda: f64,
    m: usize,
    n: usize,
    /// Primal estimate. The dual row solver maintains it as the mirror
    /// `X^T alpha`; everything else iterates on it directly.
    beta: DenseVector,
    /// Dual iterate: `alpha` for the ridge row solver, `alpha'` for the
    /// augmented solver.
    alpha: Option<DenseVector>,
    /// Residual cache of the column solvers: `y - X beta`, or
    /// `rhs - M beta` for the naive column solver.
    residual: Option<DenseVector>,
    naive: Option<NaiveSystem>,
    sampler: WeightedSampler,
    /// Squared row norms of the iterated matrix, for kinds that act on
    /// rows (both vectors filled for the augmented solver).
    row_norm_sq: Vec<f64>,
    /// Squared column norms of the iterated matrix, for column actions.
    col_norm_sq: Vec<f64>,
    rng: SeededRng,
    iteration: u64,
    noop_count: u64,
    refresh_every: u64,
    scalars: u64,
    beta_norm_sq: f64,
    alpha_norm_sq: f64,
}

impl SolverState {
    /// Creates a fresh state for `kind` on `problem`, seeding the
    /// selection stream (and the random start of the augmented solver)
    /// from `seed`.
    ///
    /// `iz_init` must be given exactly when `kind` is the augmented
    /// solver, which additionally requires `problem.lambda > 0`. The
    /// plain kinds reject an all-zero matrix, whose selection law is
    /// empty; the ridge and augmented kinds keep positive weights for
    /// every index as long as `lambda > 0`.
    pub fn init(
        kind: SolverKind,
        problem: &ProblemInstance,
        iz_init: Option<IzInit>,
        seed: u64,
    ) -> Result<SolverState, SolverError> {
        if kind == SolverKind::Iz && iz_init.is_none() {
            return Err(SolverError::InvalidConfig(
                "the augmented solver requires an initialization choice".into(),
            ));
        }
        if kind != SolverKind::Iz && iz_init.is_some() {
            return Err(SolverError::InvalidConfig(
                "initialization choices apply only to the augmented solver".into(),
            ));
        }
        if kind == SolverKind::Iz && !(problem.lambda > 0.0) {
            return Err(SolverError::InvalidConfig(
                "the augmented solver requires lambda > 0".into(),
            ));
        }

        let x = &problem.x;
        let y = &problem.y;
        let lambda = problem.lambda;
        let (m, n) = (x.rows(), x.cols());
        let mut rng = SeededRng::new(seed);

        let x_rows = || (0..m).map(|i| x.row_norm_sq(i)).collect::<Vec<f64>>();
        let x_cols = || (0..n).map(|j| x.col_norm_sq(j)).collect::<Vec<f64>>();

        let mut row_norm_sq = Vec::new();
        let mut col_norm_sq = Vec::new();
        let mut beta = DenseVector::zeros(n);
        let mut alpha = None;
        let mut residual = None;
        let mut naive = None;

        let sampler = match kind {
            SolverKind::PlainRk => {
                row_norm_sq = x_rows();
                WeightedSampler::new(&row_norm_sq)?
            }
            SolverKind::PlainRgs => {
                col_norm_sq = x_cols();
                residual = Some(y.clone());
                WeightedSampler::new(&col_norm_sq)?
            }
            SolverKind::RkRidge => {
                row_norm_sq = x_rows();
                alpha = Some(DenseVector::zeros(m));
                let w: Vec<f64> = row_norm_sq.iter().map(|r| r + lambda).collect();
                WeightedSampler::new(&w)?
            }
            SolverKind::RgsRidge => {
                col_norm_sq = x_cols();
                residual = Some(y.clone());
                let w: Vec<f64> = col_norm_sq.iter().map(|c| c + lambda).collect();
                WeightedSampler::new(&w)?
            }
            SolverKind::NaiveRkNormal | SolverKind::NaiveRgsNormal => {
                let matrix = x.gram_primal(lambda);
                let rhs = x.matvec_t(y);
                let s = if kind == SolverKind::NaiveRkNormal {
                    row_norm_sq = (0..n).map(|i| matrix.row_norm_sq(i)).collect();
                    WeightedSampler::new(&row_norm_sq)?
                } else {
                    col_norm_sq = (0..n).map(|j| matrix.col_norm_sq(j)).collect();
                    residual = Some(rhs.clone());
                    WeightedSampler::new(&col_norm_sq)?
                };
                naive = Some(NaiveSystem { matrix, rhs });
                s
            }
            SolverKind::Iz => {
                row_norm_sq = x_rows();
                col_norm_sq = x_cols();
                let w: Vec<f64> = row_norm_sq
                    .iter()
                    .chain(col_norm_sq.iter())
                    .map(|v| v + lambda)
                    .collect();
                let sampler = WeightedSampler::new(&w)?;
                let sq = lambda.sqrt();
                let ap = match iz_init.unwrap() {
                    IzInit::Zero => DenseVector::zeros(m),
                    IzInit::ScaledObservations => DenseVector::from_fn(m, |i| y[i] / sq),
                    IzInit::Mixed => DenseVector::from_fn(m, |i| y[i] / (2.0 * sq)),
                    IzInit::Random => {
                        // alpha' first, then beta, so the two draws are
                        // reproducible from the seed alone.
                        let a = DenseVector::from_fn(m, |_| rng.standard_normal());
                        beta = DenseVector::from_fn(n, |_| rng.standard_normal());
                        a
                    }
                };
                alpha = Some(ap);
                sampler
            }
        };

        let beta_norm_sq = beta.norm_sq();
        let alpha_norm_sq = alpha.as_ref().map_or(0.0, DenseVector::norm_sq);
        Ok(SolverState {
            kind,
            iz_init,
            lambda,
            sqrt_lambda: lambda.sqrt(),
            m,
            n,
            beta,
            alpha,
            residual,
            naive,
            sampler,
            row_norm_sq,
            col_norm_sq,
            rng,
            iteration: 0,
            noop_count: 0,
            refresh_every: DEFAULT_REFRESH_INTERVAL,
            scalars: 0,
            beta_norm_sq,
            alpha_norm_sq,
        })
    }

    pub fn kind(&self) -> SolverKind {
        self.kind
    }

    pub fn iz_init(&self) -> Option<IzInit> {
        self.iz_init
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Steps taken so far.
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Steps so far that moved the iterate by less than the noop
    /// threshold.
    pub fn noop_count(&self) -> u64 {
        self.noop_count
    }

    /// Scalars read or written by step kernels so far; a portable cost
    /// measure that stands in for wall time.
    pub fn scalars_touched(&self) -> u64 {
        self.scalars
    }

    /// Current primal estimate (the mirror `X^T alpha` for the dual row
    /// solver).
    pub fn beta(&self) -> &DenseVector {
        &self.beta
    }

    /// Dual iterate, when the kind has one.
    pub fn alpha(&self) -> Option<&DenseVector> {
        self.alpha.as_ref()
    }

    /// Cached residual of the column solvers, when the kind has one.
    pub fn residual_cache(&self) -> Option<&DenseVector> {
        self.residual.as_ref()
    }

    /// Selection law over rows, columns, or both (augmented).
    pub fn sampler(&self) -> &WeightedSampler {
        &self.sampler
    }

    /// Probability of drawing `choice` on the next step; zero for choices
    /// the kind never makes.
    pub fn selection_probability(&self, choice: StepChoice) -> f64 {
        match (self.kind, choice) {
            (SolverKind::Iz, StepChoice::Row(i)) => self.sampler.probability(i),
            (SolverKind::Iz, StepChoice::Column(j)) => self.sampler.probability(self.m + j),
            (k, StepChoice::Row(i)) if row_kind(k) => self.sampler.probability(i),
            (k, StepChoice::Column(j)) if !row_kind(k) => self.sampler.probability(j),
            _ => 0.0,
        }
    }

    /// Euclidean norm of the concatenated iterate vectors, from the
    /// incrementally maintained squares.
    pub fn state_scale(&self) -> f64 {
        (self.beta_norm_sq.max(0.0) + self.alpha_norm_sq.max(0.0)).sqrt()
    }

    /// Sets how many steps pass between full recomputations of derived
    /// state.
    pub fn set_refresh_interval(&mut self, every: u64) {
        assert!(every >= 1, "refresh interval must be at least 1");
        self.refresh_every = every;
    }

    /// Draws one index from the selection law and applies the step.
    pub fn step(&mut self, problem: &ProblemInstance) -> StepReport {
        let idx = self.sampler.sample(&mut self.rng);
        let choice = match self.kind {
            SolverKind::Iz => {
                if idx < self.m {
                    StepChoice::Row(idx)
                } else {
                    StepChoice::Column(idx - self.m)
                }
            }
            k if row_kind(k) => StepChoice::Row(idx),
            _ => StepChoice::Column(idx),
        };
        self.step_at(problem, choice)
    }

    /// Applies one step at a caller-chosen row or column. Panics when the
    /// choice does not exist for this kind, or the index is out of range;
    /// forced steps are a testing and analysis tool, not a safe API over
    /// untrusted input.
    pub fn step_at(&mut self, problem: &ProblemInstance, choice: StepChoice) -> StepReport {
        let scale_before = self.state_scale();
        let delta_magnitude = match (self.kind, choice) {
            (SolverKind::PlainRk, StepChoice::Row(i)) => self.plain_row_step(problem, i),
            (SolverKind::PlainRgs, StepChoice::Column(j)) => self.plain_col_step(problem, j),
            (SolverKind::RkRidge, StepChoice::Row(i)) => self.ridge_row_step(problem, i),
            (SolverKind::RgsRidge, StepChoice::Column(j)) => self.ridge_col_step(problem, j),
            (SolverKind::NaiveRkNormal, StepChoice::Row(i)) => self.naive_row_step(i),
            (SolverKind::NaiveRgsNormal, StepChoice::Column(j)) => self.naive_col_step(j),
            (SolverKind::Iz, StepChoice::Row(i)) => self.augmented_row_step(problem, i),
            (SolverKind::Iz, StepChoice::Column(j)) => self.augmented_col_step(problem, j),
            (kind, choice) => panic!("solver {} cannot take step {:?}", kind, choice),
        };
        self.scalars += 4;
        self.iteration += 1;
        let was_noop = delta_magnitude <= NOOP_RELATIVE_TOL * (1.0 + scale_before);
        if was_noop {
            self.noop_count += 1;
        }
        if self.iteration % self.refresh_every == 0 {
            self.refresh(problem);
        }
        StepReport {
            choice,
            delta_magnitude,
            was_noop,
        }
    }

    /// Runs `steps` sampled steps, recording the requested metrics at
    /// iteration 0 and at every multiple of `trace_every`.
    pub fn run(
        &mut self,
        problem: &ProblemInstance,
        steps: u64,
        trace_every: u64,
        metrics: MetricSet,
        trial: u64,
    ) -> Vec<TraceRecord> {
        assert!(steps >= 1, "step budget must be at least 1");
        assert!(trace_every >= 1, "trace interval must be at least 1");
        let xty = if metrics.err_normal {
            Some(problem.x.matvec_t(&problem.y))
        } else {
            None
        };
        let mut out = Vec::with_capacity((steps / trace_every + 1) as usize);
        out.push(self.trace_record(problem, trial, metrics, xty.as_ref()));
        for t in 1..=steps {
            self.step(problem);
            if t % trace_every == 0 {
                out.push(self.trace_record(problem, trial, metrics, xty.as_ref()));
            }
        }
        out
    }

    fn trace_record(
        &self,
        problem: &ProblemInstance,
        trial: u64,
        metrics: MetricSet,
        xty: Option<&DenseVector>,
    ) -> TraceRecord {
        let x = &problem.x;
        let oracle = &problem.oracle;
        let err_beta = if metrics.err_beta {
            self.beta.sub(&oracle.beta_star).norm()
        } else {
            f64::NAN
        };
        let err_normal = if metrics.err_normal {
            let mut v = x.matvec_t(&x.matvec(&self.beta));
            v.axpy(-1.0, xty.expect("X^T y cached when err_normal is on"));
            v.norm()
        } else {
            f64::NAN
        };
        let err_weighted = if metrics.err_weighted {
            match self.kind {
                SolverKind::RkRidge => theory::dual_weighted_error_sq(
                    x,
                    self.lambda,
                    self.alpha.as_ref().expect("dual iterate present"),
                    &oracle.alpha_star,
                )
                .sqrt(),
                SolverKind::RgsRidge => {
                    theory::primal_weighted_error_sq(x, self.lambda, &self.beta, &oracle.beta_star)
                        .sqrt()
                }
                _ => self.beta.sub(&oracle.beta_star).norm(),
            }
        } else {
            f64::NAN
        };
        TraceRecord {
            algorithm: self.kind,
            iz_init: self.iz_init,
            m: self.m,
            n: self.n,
            lambda: self.lambda,
            sigma_min: problem.sigma_min,
            trial,
            iteration: self.iteration,
            err_beta,
            err_normal,
            err_weighted,
            noop_count: metrics.noop_count.then_some(self.noop_count),
            wall_ns: 0,
        }
    }

    fn plain_row_step(&mut self, problem: &ProblemInstance, i: usize) -> f64 {
        let w = self.row_norm_sq[i];
        assert!(w > 0.0, "row {} has zero norm and cannot be projected on", i);
        let x = &problem.x;
        let dot = x.row_dot(i, self.beta.as_slice());
        let delta = (problem.y[i] - dot) / w;
        x.row_axpy(i, delta, self.beta.as_mut_slice());
        self.beta_norm_sq += 2.0 * delta * dot + delta * delta * w;
        self.scalars += 2 * self.n as u64;
        delta.abs() * w.sqrt()
    }

    fn plain_col_step(&mut self, problem: &ProblemInstance, j: usize) -> f64 {
        let w = self.col_norm_sq[j];
        assert!(w > 0.0, "column {} has zero norm and cannot be used", j);
        let x = &problem.x;
        let r = self.residual.as_mut().expect("column solver has a residual");
        let delta = x.col_dot(j, r.as_slice()) / w;
        x.col_axpy(j, -delta, r.as_mut_slice());
        let old = self.beta[j];
        self.beta[j] = old + delta;
        self.beta_norm_sq += 2.0 * delta * old + delta * delta;
        self.scalars += 2 * self.m as u64;
        delta.abs()
    }

    fn ridge_row_step(&mut self, problem: &ProblemInstance, i: usize) -> f64 {
        let raw = self.row_norm_sq[i];
        let w = raw + self.lambda;
        let x = &problem.x;
        let alpha = self.alpha.as_mut().expect("dual solver has alpha");
        let dot = x.row_dot(i, self.beta.as_slice());
        let a_old = alpha[i];
        let delta = (problem.y[i] - dot - self.lambda * a_old) / w;
        alpha[i] = a_old + delta;
        self.alpha_norm_sq += 2.0 * delta * a_old + delta * delta;
        x.row_axpy(i, delta, self.beta.as_mut_slice());
        self.beta_norm_sq += 2.0 * delta * dot + delta * delta * raw;
        self.scalars += 2 * self.n as u64;
        delta.abs()
    }

    fn ridge_col_step(&mut self, problem: &ProblemInstance, j: usize) -> f64 {
        let raw = self.col_norm_sq[j];
        let w = raw + self.lambda;
        let x = &problem.x;
        let b_old = self.beta[j];
        let r = self.residual.as_mut().expect("column solver has a residual");
        let delta = (x.col_dot(j, r.as_slice()) - self.lambda * b_old) / w;
        x.col_axpy(j, -delta, r.as_mut_slice());
        self.beta[j] = b_old + delta;
        self.beta_norm_sq += 2.0 * delta * b_old + delta * delta;
        self.scalars += 2 * self.m as u64;
        delta.abs()
    }

    fn naive_row_step(&mut self, i: usize) -> f64 {
        let w = self.row_norm_sq[i];
        assert!(w > 0.0, "normal-system row {} has zero norm", i);
        let sys = self.naive.as_ref().expect("naive solver has its system");
        let dot = sys.matrix.row_dot(i, self.beta.as_slice());
        let delta = (sys.rhs[i] - dot) / w;
        sys.matrix.row_axpy(i, delta, self.beta.as_mut_slice());
        self.beta_norm_sq += 2.0 * delta * dot + delta * delta * w;
        self.scalars += 2 * self.n as u64;
        delta.abs() * w.sqrt()
    }

    fn naive_col_step(&mut self, j: usize) -> f64 {
        let w = self.col_norm_sq[j];
        assert!(w > 0.0, "normal-system column {} has zero norm", j);
        let sys = self.naive.as_ref().expect("naive solver has its system");
        let r = self.residual.as_mut().expect("column solver has a residual");
        let delta = sys.matrix.col_dot(j, r.as_slice()) / w;
        sys.matrix.col_axpy(j, -delta, r.as_mut_slice());
        let old = self.beta[j];
        self.beta[j] = old + delta;
        self.beta_norm_sq += 2.0 * delta * old + delta * delta;
        self.scalars += 2 * self.n as u64;
        delta.abs()
    }

    fn augmented_row_step(&mut self, problem: &ProblemInstance, i: usize) -> f64 {
        let raw = self.row_norm_sq[i];
        let w = raw + self.lambda;
        let x = &problem.x;
        let ap = self.alpha.as_mut().expect("augmented solver has alpha'");
        let dot = x.row_dot(i, self.beta.as_slice());
        let a_old = ap[i];
        let delta = (problem.y[i] - self.sqrt_lambda * a_old - dot) / w;
        let a_inc = self.sqrt_lambda * delta;
        ap[i] = a_old + a_inc;
        self.alpha_norm_sq += 2.0 * a_inc * a_old + a_inc * a_inc;
        x.row_axpy(i, delta, self.beta.as_mut_slice());
        self.beta_norm_sq += 2.0 * delta * dot + delta * delta * raw;
        self.scalars += 2 * self.n as u64;
        delta.abs() * w.sqrt()
    }

    fn augmented_col_step(&mut self, problem: &ProblemInstance, j: usize) -> f64 {
        let raw = self.col_norm_sq[j];
        let w = raw + self.lambda;
        let x = &problem.x;
        let ap = self.alpha.as_mut().expect("augmented solver has alpha'");
        let b_old = self.beta[j];
        let dot = x.col_dot(j, ap.as_slice());
        let delta = (self.sqrt_lambda * b_old - dot) / w;
        x.col_axpy(j, delta, ap.as_mut_slice());
        self.alpha_norm_sq += 2.0 * delta * dot + delta * delta * raw;
        let b_inc = -self.sqrt_lambda * delta;
        self.beta[j] = b_old + b_inc;
        self.beta_norm_sq += 2.0 * b_inc * b_old + b_inc * b_inc;
        self.scalars += 2 * self.m as u64;
        delta.abs() * w.sqrt()
    }

    /// Recomputes every derived quantity from the primary iterate,
    /// discarding accumulated drift.
    fn refresh(&mut self, problem: &ProblemInstance) {
        let x = &problem.x;
        match self.kind {
            SolverKind::RkRidge => {
                let alpha = self.alpha.as_ref().expect("dual solver has alpha");
                self.beta = x.matvec_t(alpha);
                self.scalars += (self.m * self.n) as u64;
            }
            SolverKind::PlainRgs | SolverKind::RgsRidge => {
                let mut r = problem.y.clone();
                r.axpy(-1.0, &x.matvec(&self.beta));
                self.residual = Some(r);
                self.scalars += (self.m * self.n + self.m) as u64;
            }
            SolverKind::NaiveRgsNormal => {
                let sys = self.naive.as_ref().expect("naive solver has its system");
                let mut r = sys.rhs.clone();
                r.axpy(-1.0, &sys.matrix.matvec(&self.beta));
                self.residual = Some(r);
                self.scalars += (self.n * self.n + self.n) as u64;
            }
            SolverKind::PlainRk | SolverKind::NaiveRkNormal | SolverKind::Iz => {}
        }
        self.beta_norm_sq = self.beta.norm_sq();
        self.alpha_norm_sq = self.alpha.as_ref().map_or(0.0, DenseVector::norm_sq);
        self.scalars += (self.n + self.m) as u64;
    }

    #[cfg(test)]
    pub(crate) fn set_iterates_for_tests(
        &mut self,
        problem: &ProblemInstance,
        beta: Option<DenseVector>,
        alpha: Option<DenseVector>,
    ) {
        if let Some(a) = alpha {
            *self.alpha.as_mut().expect("kind has no dual iterate") = a;
        }
        match self.kind {
            SolverKind::RkRidge => {
                self.beta = problem
                    .x
                    .matvec_t(self.alpha.as_ref().expect("dual solver has alpha"));
            }
            _ => {
                if let Some(b) = beta {
                    self.beta = b;
                }
            }
        }
        if self.residual.is_some() {
            match self.kind {
                SolverKind::NaiveRgsNormal => {
                    let sys = self.naive.as_ref().expect("naive system present");
                    let mut r = sys.rhs.clone();
                    r.axpy(-1.0, &sys.matrix.matvec(&self.beta));
                    self.residual = Some(r);
                }
                _ => {
                    let mut r = problem.y.clone();
                    r.axpy(-1.0, &problem.x.matvec(&self.beta));
                    self.residual = Some(r);
                }
            }
        }
        self.beta_norm_sq = self.beta.norm_sq();
        self.alpha_norm_sq = self.alpha.as_ref().map_or(0.0, DenseVector::norm_sq);
    }
}

fn row_kind(kind: SolverKind) -> bool {
    matches!(
        kind,
        SolverKind::PlainRk | SolverKind::RkRidge | SolverKind::NaiveRkNormal
    )
}
