//! Long-horizon runs: every solver actually reaches its target on
//! desk-scale instances, and trial-averaged errors respect the
//! closed-form contraction bounds step by step.

use ridgelab::linalg::singular_values;
use ridgelab::problems;
use ridgelab::solvers::{IzInit, SolverKind, SolverState};
use ridgelab::theory;

#[test]
fn ridge_solvers_reach_the_oracle() {
    let p = problems::generate(20, 8, 0.3, 0.1, 42).unwrap();
    for kind in [SolverKind::RkRidge, SolverKind::RgsRidge] {
        let mut s = SolverState::init(kind, &p, None, 7).unwrap();
        for _ in 0..50_000 {
            s.step(&p);
        }
        let err = match kind {
            SolverKind::RkRidge => theory::dual_weighted_error_sq(
                &p.x,
                p.lambda,
                s.alpha().expect("dual iterate"),
                &p.oracle.alpha_star,
            ),
            _ => theory::primal_weighted_error_sq(&p.x, p.lambda, s.beta(), &p.oracle.beta_star),
        };
        assert!(err <= 1e-8, "{} stalled at weighted error {:.3e}", kind, err);
    }
}

#[test]
fn every_augmented_start_reaches_the_oracle() {
    let p = problems::generate(10, 6, 0.4, 0.05, 5).unwrap();
    for init in IzInit::ALL {
        let mut s = SolverState::init(SolverKind::Iz, &p, Some(init), 13).unwrap();
        for _ in 0..20_000 {
            s.step(&p);
        }
        let err = s.beta().sub(&p.oracle.beta_star).norm();
        assert!(err <= 1e-6, "iz:{} stalled at {:.3e}", init, err);
    }
}

#[test]
fn naive_normal_iterations_converge_when_well_conditioned() {
    let p = problems::generate(20, 8, 0.9, 0.1, 8).unwrap();
    for kind in [SolverKind::NaiveRkNormal, SolverKind::NaiveRgsNormal] {
        let mut s = SolverState::init(kind, &p, None, 21).unwrap();
        for _ in 0..30_000 {
            s.step(&p);
        }
        let err = s.beta().sub(&p.oracle.beta_star).norm();
        assert!(err <= 1e-8, "{} stalled at {:.3e}", kind, err);
    }
}

#[test]
fn plain_solvers_recover_consistent_systems() {
    let seeded = problems::generate(20, 8, 0.5, 0.0, 17).unwrap();
    let y = seeded.x.matvec(&seeded.beta_true);
    let p = problems::ProblemInstance::assemble(seeded.x, y, seeded.beta_true, 0.0, 0.5, 17)
        .unwrap();
    for kind in [SolverKind::PlainRk, SolverKind::PlainRgs] {
        let mut s = SolverState::init(kind, &p, None, 3).unwrap();
        for _ in 0..50_000 {
            s.step(&p);
        }
        let err = s.beta().sub(&p.oracle.beta_star).norm();
        assert!(err <= 1e-8, "{} stalled at {:.3e}", kind, err);
    }
}

/// Averaging many independent runs must trace under the geometric bound
/// curve at every recorded step (up to sampling slack): the per-step
/// guarantee compounds.
#[test]
fn trial_means_respect_the_contraction_bound() {
    let (m, n, lambda) = (12, 5, 0.05);
    let p = problems::generate(m, n, 0.4, lambda, 3).unwrap();
    let spectrum = singular_values(&p.x).unwrap();
    let (trials, steps) = (400u64, 150usize);

    for kind in [SolverKind::RkRidge, SolverKind::RgsRidge] {
        let factor = theory::contraction_factor(kind, m, n, &spectrum, lambda)
            .unwrap()
            .factor;
        let mut means = vec![0.0f64; steps + 1];
        for trial in 0..trials {
            let mut s = SolverState::init(kind, &p, None, 1000 + trial).unwrap();
            for (step, mean) in means.iter_mut().enumerate() {
                if step > 0 {
                    s.step(&p);
                }
                let err = match kind {
                    SolverKind::RkRidge => theory::dual_weighted_error_sq(
                        &p.x,
                        lambda,
                        s.alpha().expect("dual iterate"),
                        &p.oracle.alpha_star,
                    ),
                    _ => theory::primal_weighted_error_sq(
                        &p.x,
                        lambda,
                        s.beta(),
                        &p.oracle.beta_star,
                    ),
                };
                *mean += err / trials as f64;
            }
        }
        let bound = theory::bound_curve(factor, means[0], steps);
        for (step, (mean, cap)) in means.iter().zip(&bound).enumerate() {
            assert!(
                *mean <= cap * 1.4 + 1e-12,
                "{} mean {:.3e} above bound {:.3e} at step {}",
                kind,
                mean,
                cap,
                step
            );
        }
    }
}
