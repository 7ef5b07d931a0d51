//! Self-contained consistency checks between the solvers and the theory.
//!
//! Each check runs deterministic seeded instances, compares a measured
//! quantity against its closed form, and reports a pass/fail with the
//! observed deviation. The quick suite covers the identities; the full
//! suite adds the slower empirical rate-crossover checks.

use crate::linalg::{DenseVector, SeededRng};
use crate::problems::{self, prescribed_spectrum, ProblemInstance};
use crate::solvers::{IzInit, SolverKind, SolverState, StepChoice};
use crate::theory;

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
        CheckOutcome {
            name,
            passed,
            detail,
        }
    }
}

/// Runs the whole suite; `full` adds the empirical crossover checks and
/// widens the instance sweeps.
pub fn run_suite(full: bool) -> Vec<CheckOutcome> {
    let mut out = vec![
        expectation_identity_dual(if full { 50 } else { 12 }),
        expectation_identity_primal(if full { 50 } else { 12 }),
        bound_dominance(if full { 50 } else { 12 }),
        oracle_duality(full),
        iz_zero_start_closure(),
        iz_scaled_start_closure(),
        augmented_condition(),
        generator_spectrum(),
    ];
    if full {
        out.push(crossover(true));
        out.push(crossover(false));
    }
    out
}

fn small_shapes(count: usize, seed: u64) -> Vec<(usize, usize, f64, u64)> {
    // Cycle of shapes spanning tall, wide, and square, with lambda swept
    // over several decades including zero for the primal side coverage.
    let shapes = [(9usize, 4usize), (4, 9), (7, 7), (10, 3), (3, 10), (5, 5)];
    let lambdas = [1e-3, 1e-2, 1e-1, 1.0];
    (0..count)
        .map(|i| {
            let (m, n) = shapes[i % shapes.len()];
            let lambda = lambdas[i % lambdas.len()];
            (m, n, lambda, seed + i as u64)
        })
        .collect()
}

fn random_iterate(len: usize, rng: &mut SeededRng) -> DenseVector {
    DenseVector::from_fn(len, |_| rng.standard_normal())
}

/// Enumerates the dual row step over every row and averages the post-step
/// weighted errors under the selection law.
fn enumerate_dual(p: &ProblemInstance, alpha: &DenseVector) -> f64 {
    let x = &p.x;
    let m = x.rows();
    let total = x.frobenius_norm_sq() + m as f64 * p.lambda;
    let mirror = x.matvec_t(alpha);
    let mut acc = 0.0;
    for i in 0..m {
        let w = x.row_norm_sq(i) + p.lambda;
        let delta = (p.y[i] - x.row_dot(i, mirror.as_slice()) - p.lambda * alpha[i]) / w;
        let mut next = alpha.clone();
        next[i] += delta;
        acc += (w / total) * theory::dual_weighted_error_sq(x, p.lambda, &next, &p.oracle.alpha_star);
    }
    acc
}

/// Same enumeration for the primal column step.
fn enumerate_primal(p: &ProblemInstance, beta: &DenseVector) -> f64 {
    let x = &p.x;
    let n = x.cols();
    let total = x.frobenius_norm_sq() + n as f64 * p.lambda;
    let mut residual = p.y.clone();
    residual.axpy(-1.0, &x.matvec(beta));
    let mut acc = 0.0;
    for j in 0..n {
        let w = x.col_norm_sq(j) + p.lambda;
        let delta = (x.col_dot(j, residual.as_slice()) - p.lambda * beta[j]) / w;
        let mut next = beta.clone();
        next[j] += delta;
        acc +=
            (w / total) * theory::primal_weighted_error_sq(x, p.lambda, &next, &p.oracle.beta_star);
    }
    acc
}

fn expectation_identity_dual(count: usize) -> CheckOutcome {
    let mut worst = 0.0f64;
    for (m, n, lambda, seed) in small_shapes(count, 1000) {
        let p = problems::generate(m, n, 0.3, lambda, seed).expect("generation");
        let mut rng = SeededRng::new(seed).derive("dual-iterate");
        let alpha = random_iterate(m, &mut rng);
        let closed =
            theory::expected_onestep_error_dual(&p.x, &p.y, lambda, &alpha, &p.oracle.alpha_star);
        let enumerated = enumerate_dual(&p, &alpha);
        let dev = (closed - enumerated).abs() / enumerated.abs().max(1e-30);
        worst = worst.max(dev);
    }
    CheckOutcome::new(
        "expectation-identity-dual",
        worst <= 1e-10,
        format!("max relative deviation {:.2e} over {} instances", worst, count),
    )
}

fn expectation_identity_primal(count: usize) -> CheckOutcome {
    let mut worst = 0.0f64;
    for (m, n, lambda, seed) in small_shapes(count, 2000) {
        let p = problems::generate(m, n, 0.3, lambda, seed).expect("generation");
        let mut rng = SeededRng::new(seed).derive("primal-iterate");
        let beta = random_iterate(n, &mut rng);
        let closed =
            theory::expected_onestep_error_primal(&p.x, &p.y, lambda, &beta, &p.oracle.beta_star);
        let enumerated = enumerate_primal(&p, &beta);
        let dev = (closed - enumerated).abs() / enumerated.abs().max(1e-30);
        worst = worst.max(dev);
    }
    CheckOutcome::new(
        "expectation-identity-primal",
        worst <= 1e-10,
        format!("max relative deviation {:.2e} over {} instances", worst, count),
    )
}

fn bound_dominance(count: usize) -> CheckOutcome {
    let mut worst = f64::NEG_INFINITY;
    for (m, n, lambda, seed) in small_shapes(count, 3000) {
        let p = problems::generate(m, n, 0.3, lambda, seed).expect("generation");
        let spectrum: Vec<f64> = {
            let mut s = prescribed_spectrum(m.min(n), 0.3);
            s.reverse();
            s
        };
        let mut rng = SeededRng::new(seed).derive("dominance-iterate");

        let alpha = random_iterate(m, &mut rng);
        let current = theory::dual_weighted_error_sq(&p.x, lambda, &alpha, &p.oracle.alpha_star);
        let expect =
            theory::expected_onestep_error_dual(&p.x, &p.y, lambda, &alpha, &p.oracle.alpha_star);
        let factor = theory::contraction_factor(SolverKind::RkRidge, m, n, &spectrum, lambda)
            .expect("factor")
            .factor;
        worst = worst.max((expect - factor * current) / current.max(1e-30));

        let beta = random_iterate(n, &mut rng);
        let current = theory::primal_weighted_error_sq(&p.x, lambda, &beta, &p.oracle.beta_star);
        let expect =
            theory::expected_onestep_error_primal(&p.x, &p.y, lambda, &beta, &p.oracle.beta_star);
        let factor = theory::contraction_factor(SolverKind::RgsRidge, m, n, &spectrum, lambda)
            .expect("factor")
            .factor;
        worst = worst.max((expect - factor * current) / current.max(1e-30));
    }
    CheckOutcome::new(
        "bound-dominance",
        worst <= 1e-10,
        format!(
            "worst (expected - bound)/current {:.2e} over {} instances",
            worst, count
        ),
    )
}

fn oracle_duality(full: bool) -> CheckOutcome {
    let (count, max_dim) = if full { (100, 200) } else { (20, 40) };
    let mut worst = 0.0f64;
    let mut rng = SeededRng::new(4000);
    for i in 0..count {
        let m = 2 + (rng.uniform_open01() * (max_dim - 1) as f64) as usize;
        let n = 2 + (rng.uniform_open01() * (max_dim - 1) as f64) as usize;
        let lambda = [1e-3, 1e-2, 1e-1][i % 3];
        let p = problems::generate(m, n, 0.1, lambda, 4000 + i as u64).expect("generation");
        let gap = p.oracle.beta_star.sub(&p.x.matvec_t(&p.oracle.alpha_star)).norm();
        worst = worst.max(gap / (1.0 + p.oracle.beta_star.norm()));
    }
    CheckOutcome::new(
        "oracle-duality",
        worst <= 1e-8,
        format!(
            "max relative primal-dual gap {:.2e} over {} instances",
            worst, count
        ),
    )
}

fn iz_zero_start_closure() -> CheckOutcome {
    let p = problems::generate(30, 12, 0.4, 0.05, 5000).expect("generation");
    let mut s = SolverState::init(SolverKind::Iz, &p, Some(IzInit::Zero), 5001).expect("init");
    let mut worst = 0.0f64;
    for _sweep in 0..30 {
        for _ in 0..50 {
            s.step(&p);
        }
        let scale = s.state_scale();
        for j in 0..12 {
            let rep = s.step_at(&p, StepChoice::Column(j));
            worst = worst.max(rep.delta_magnitude / (1.0 + scale));
        }
    }
    CheckOutcome::new(
        "iz-zero-start-closure",
        worst <= 1e-12,
        format!("max relative column movement {:.2e}", worst),
    )
}

fn iz_scaled_start_closure() -> CheckOutcome {
    let p = problems::generate(30, 12, 0.4, 0.05, 6000).expect("generation");
    let mut s = SolverState::init(SolverKind::Iz, &p, Some(IzInit::ScaledObservations), 6001)
        .expect("init");
    let mut worst = 0.0f64;
    for _sweep in 0..30 {
        for _ in 0..50 {
            s.step(&p);
        }
        let scale = s.state_scale();
        for i in 0..30 {
            let rep = s.step_at(&p, StepChoice::Row(i));
            worst = worst.max(rep.delta_magnitude / (1.0 + scale));
        }
    }
    CheckOutcome::new(
        "iz-scaled-start-closure",
        worst <= 1e-12,
        format!("max relative row movement {:.2e}", worst),
    )
}

fn augmented_condition() -> CheckOutcome {
    let mut worst = 0.0f64;
    for (m, n, seed) in [(12usize, 7usize, 7000u64), (7, 12, 7001), (9, 9, 7002)] {
        for lambda in [1e-3, 1e-1] {
            let p = problems::generate(m, n, 0.05, lambda, seed).expect("generation");
            let (cond_a, cond_g) = theory::iz_condition_check(&p.x, lambda).expect("conditions");
            worst = worst.max((cond_a - cond_g.sqrt()).abs() / cond_a);
        }
    }
    CheckOutcome::new(
        "augmented-condition",
        worst <= 1e-6,
        format!("max relative identity gap {:.2e}", worst),
    )
}

fn generator_spectrum() -> CheckOutcome {
    let mut worst = 0.0f64;
    for (m, n, sigma_min, seed) in [
        (20usize, 8usize, 0.01f64, 8000u64),
        (8, 20, 0.1, 8001),
        (15, 15, 0.001, 8002),
    ] {
        let p = problems::generate(m, n, sigma_min, 0.1, seed).expect("generation");
        let sv = crate::linalg::singular_values(&p.x).expect("singular values");
        let largest = sv[sv.len() - 1];
        let smallest = sv[0];
        worst = worst.max((largest - 1.0).abs());
        worst = worst.max((smallest - sigma_min).abs() / sigma_min);
        let want: f64 = prescribed_spectrum(m.min(n), sigma_min)
            .iter()
            .map(|s| s * s)
            .sum();
        worst = worst.max((p.x.frobenius_norm_sq() - want).abs() / want);
    }
    CheckOutcome::new(
        "generator-spectrum",
        worst <= 1e-9,
        format!("max endpoint/mass deviation {:.2e}", worst),
    )
}

/// Empirical rate crossover: on tall instances the primal column solver
/// should beat the dual row solver, and the wide transpose should flip
/// the ordering.
fn crossover(tall: bool) -> CheckOutcome {
    let (m, n) = if tall { (200, 50) } else { (50, 200) };
    let trials = 5u64;
    let steps = 4000u64;
    let mut rk_total = 0.0;
    let mut rgs_total = 0.0;
    for trial in 0..trials {
        let seed = 9000 + trial;
        let p = problems::generate(m, n, 0.1, 1e-2, seed).expect("generation");
        let mut rk = SolverState::init(SolverKind::RkRidge, &p, None, seed ^ 0xA5).expect("init");
        let mut rgs = SolverState::init(SolverKind::RgsRidge, &p, None, seed ^ 0x5A).expect("init");
        for _ in 0..steps {
            rk.step(&p);
            rgs.step(&p);
        }
        rk_total += rk.beta().sub(&p.oracle.beta_star).norm();
        rgs_total += rgs.beta().sub(&p.oracle.beta_star).norm();
    }
    let (name, passed) = if tall {
        ("crossover-tall", rgs_total < rk_total)
    } else {
        ("crossover-wide", rk_total < rgs_total)
    };
    CheckOutcome::new(
        name,
        passed,
        format!(
            "{}x{}: mean final error rk-ridge {:.3e}, rgs-ridge {:.3e}",
            m,
            n,
            rk_total / trials as f64,
            rgs_total / trials as f64
        ),
    )
}
