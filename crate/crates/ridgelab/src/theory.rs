//! Closed-form convergence predictions for the solver family.
//!
//! Everything here is deterministic arithmetic on the problem data: the
//! per-step contraction factors of each randomized solver, the exact
//! expected error after one step, reference solutions of the regularized
//! primal and dual systems, and the spectral structure of the augmented
//! row-plus-column system.

use crate::linalg::{self, DenseMatrix, DenseVector, LinAlgError};
use crate::solvers::SolverKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("lambda must be {expected}, got {got}")]
    InvalidLambda { expected: &'static str, got: f64 },
    #[error("no closed-form result for solver {0}")]
    UnsupportedKind(&'static str),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("oracle validation failed: {0}")]
    OracleValidation(String),
}

/// Shape of the design matrix, as seen by the rate formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// More rows than columns.
    OverDetermined,
    /// More columns than rows.
    UnderDetermined,
    /// Equal row and column counts; the rate formulas use the
    /// full-spectrum branch, since neither Gram matrix carries zero
    /// padding.
    Square,
}

/// Norm in which a solver's expected error contracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMatrix {
    /// Dual system matrix `X X^T + lambda I`.
    KPrime,
    /// Primal system matrix `X^T X + lambda I`.
    SigmaPrime,
    /// Plain Euclidean norm on the iterate.
    Euclidean,
    /// Gram matrix of the iterated system's coefficient matrix: `X^T X`
    /// for the plain column solver, the square of the formed normal
    /// matrix for the naive column solver.
    XGram,
}

/// Per-step expected contraction factor together with the norm and shape
/// regime it applies to.
#[derive(Debug, Clone, Copy)]
pub struct RateBound {
    pub applies_to: SolverKind,
    pub factor: f64,
    pub regime: Regime,
    pub norm: NormMatrix,
}

fn regime_of(m: usize, n: usize) -> Regime {
    use std::cmp::Ordering::*;
    match m.cmp(&n) {
        Greater => Regime::OverDetermined,
        Less => Regime::UnderDetermined,
        Equal => Regime::Square,
    }
}

/// Expected one-step contraction factor for `kind` on a problem with shape
/// `m x n`, singular values `spectrum` (ascending), and ridge weight
/// `lambda`.
///
/// The factor multiplies the expected squared error in the norm named by
/// the returned [`RateBound::norm`]:
///
/// * plain row and column solvers contract by `1 - s_min^2 / sum(s^2)`;
/// * the ridge row solver contracts by `1 - eig_min(K') / trace(K')` with
///   `K' = X X^T + lambda I`, where `eig_min` is `lambda` when rows
///   outnumber columns and `s_min^2 + lambda` otherwise;
/// * the ridge column solver mirrors that with `Sigma' = X^T X + lambda I`;
/// * the naive solvers run the plain row or column method on the formed
///   normal matrix `M = X^T X + lambda I`, so their factor is
///   `1 - eig_min(M)^2 / fro(M)^2`, squaring the spectral spread.
///
/// The augmented solver has no single closed-form factor here; see
/// [`iz_condition_check`] for its conditioning identity.
pub fn contraction_factor(
    kind: SolverKind,
    m: usize,
    n: usize,
    spectrum: &[f64],
    lambda: f64,
) -> Result<RateBound, TheoryError> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(TheoryError::InvalidLambda {
            expected: "finite and nonnegative",
            got: lambda,
        });
    }
    let k = m.min(n);
    if spectrum.is_empty() || spectrum.len() != k {
        return Err(TheoryError::InvalidSpectrum(format!(
            "expected {} singular values for a {}x{} matrix, got {}",
            k,
            m,
            n,
            spectrum.len()
        )));
    }
    for w in spectrum.windows(2) {
        if w[0] > w[1] {
            return Err(TheoryError::InvalidSpectrum(
                "singular values must be ascending".into(),
            ));
        }
    }
    if spectrum[0] < 0.0 || !spectrum.iter().all(|s| s.is_finite()) {
        return Err(TheoryError::InvalidSpectrum(
            "singular values must be finite and nonnegative".into(),
        ));
    }

    let regime = regime_of(m, n);
    let s_min_sq = spectrum[0] * spectrum[0];
    let sum_sq: f64 = spectrum.iter().map(|s| s * s).sum();

    let (factor, norm) = match kind {
        SolverKind::PlainRk | SolverKind::PlainRgs => {
            if sum_sq == 0.0 {
                return Err(TheoryError::InvalidSpectrum(
                    "zero matrix has no contraction factor".into(),
                ));
            }
            let f = 1.0 - s_min_sq / sum_sq;
            let norm = if kind == SolverKind::PlainRk {
                NormMatrix::Euclidean
            } else {
                NormMatrix::XGram
            };
            (f, norm)
        }
        SolverKind::RkRidge => {
            let trace = sum_sq + m as f64 * lambda;
            if trace == 0.0 {
                return Err(TheoryError::InvalidSpectrum(
                    "zero matrix with zero lambda has no contraction factor".into(),
                ));
            }
            // eig_min of K' = X X^T + lambda I: the dual Gram picks up
            // m - k zero singular values when rows outnumber columns.
            let eig_min = if m > n { lambda } else { s_min_sq + lambda };
            (1.0 - eig_min / trace, NormMatrix::KPrime)
        }
        SolverKind::RgsRidge => {
            let trace = sum_sq + n as f64 * lambda;
            if trace == 0.0 {
                return Err(TheoryError::InvalidSpectrum(
                    "zero matrix with zero lambda has no contraction factor".into(),
                ));
            }
            let eig_min = if n > m { lambda } else { s_min_sq + lambda };
            (1.0 - eig_min / trace, NormMatrix::SigmaPrime)
        }
        SolverKind::NaiveRkNormal | SolverKind::NaiveRgsNormal => {
            // Spectrum of M = X^T X + lambda I: s_i^2 + lambda, padded
            // with n - k copies of lambda.
            let pad = (n - k) as f64;
            let eig_min = if n > k { lambda } else { s_min_sq + lambda };
            let fro_sq: f64 = spectrum
                .iter()
                .map(|s| (s * s + lambda) * (s * s + lambda))
                .sum::<f64>()
                + pad * lambda * lambda;
            if fro_sq == 0.0 {
                return Err(TheoryError::InvalidSpectrum(
                    "zero normal matrix has no contraction factor".into(),
                ));
            }
            let f = 1.0 - eig_min * eig_min / fro_sq;
            let norm = if kind == SolverKind::NaiveRkNormal {
                NormMatrix::Euclidean
            } else {
                NormMatrix::XGram
            };
            (f, norm)
        }
        SolverKind::Iz => return Err(TheoryError::UnsupportedKind("iz")),
    };

    Ok(RateBound {
        applies_to: kind,
        factor: factor.clamp(0.0, 1.0),
        regime,
        norm,
    })
}

/// Squared error of a dual iterate in the `K' = X X^T + lambda I` norm,
/// computed as `|X^T d|^2 + lambda |d|^2` without forming `K'`.
pub fn dual_weighted_error_sq(
    x: &DenseMatrix,
    lambda: f64,
    alpha: &DenseVector,
    alpha_star: &DenseVector,
) -> f64 {
    let d = alpha.sub(alpha_star);
    x.matvec_t(&d).norm_sq() + lambda * d.norm_sq()
}

/// Squared error of a primal iterate in the `Sigma' = X^T X + lambda I`
/// norm, computed as `|X d|^2 + lambda |d|^2`.
pub fn primal_weighted_error_sq(
    x: &DenseMatrix,
    lambda: f64,
    beta: &DenseVector,
    beta_star: &DenseVector,
) -> f64 {
    let d = beta.sub(beta_star);
    x.matvec(&d).norm_sq() + lambda * d.norm_sq()
}

/// Exact expected squared weighted error of the ridge row solver after one
/// step from `alpha`: the current error minus the full residual mass over
/// the trace of the dual system,
/// `|alpha - alpha*|^2_{K'} - |y - K' alpha|^2 / (fro(X)^2 + m lambda)`.
pub fn expected_onestep_error_dual(
    x: &DenseMatrix,
    y: &DenseVector,
    lambda: f64,
    alpha: &DenseVector,
    alpha_star: &DenseVector,
) -> f64 {
    let current = dual_weighted_error_sq(x, lambda, alpha, alpha_star);
    // K' alpha = X (X^T alpha) + lambda alpha.
    let mut k_alpha = x.matvec(&x.matvec_t(alpha));
    k_alpha.axpy(lambda, alpha);
    let residual_sq = y.sub(&k_alpha).norm_sq();
    let trace = x.frobenius_norm_sq() + x.rows() as f64 * lambda;
    current - residual_sq / trace
}

/// Exact expected squared weighted error of the ridge column solver after
/// one step from `beta`:
/// `|beta - beta*|^2_{Sigma'} - |X^T y - Sigma' beta|^2 / (fro(X)^2 + n lambda)`.
pub fn expected_onestep_error_primal(
    x: &DenseMatrix,
    y: &DenseVector,
    lambda: f64,
    beta: &DenseVector,
    beta_star: &DenseVector,
) -> f64 {
    let current = primal_weighted_error_sq(x, lambda, beta, beta_star);
    let mut sigma_beta = x.matvec_t(&x.matvec(beta));
    sigma_beta.axpy(lambda, beta);
    let residual_sq = x.matvec_t(y).sub(&sigma_beta).norm_sq();
    let trace = x.frobenius_norm_sq() + x.cols() as f64 * lambda;
    current - residual_sq / trace
}

/// Geometric bound curve `initial_error * factor^t` for `t = 0..=t_max`.
///
/// `factor` must lie in `[0, 1]` and `initial_error` must be nonnegative;
/// both are programmer-supplied contract values and panic when violated.
pub fn bound_curve(factor: f64, initial_error: f64, t_max: usize) -> Vec<f64> {
    assert!(
        (0.0..=1.0).contains(&factor),
        "contraction factor {} outside [0, 1]",
        factor
    );
    assert!(initial_error >= 0.0, "negative initial error");
    let mut out = Vec::with_capacity(t_max + 1);
    let mut v = initial_error;
    for _ in 0..=t_max {
        out.push(v);
        v *= factor;
    }
    out
}

/// Builds the symmetric `(m+n) x (m+n)` augmented system
/// `[[sqrt(lambda) I, X], [X^T, -sqrt(lambda) I]]` whose row and column
/// actions combine the dual and primal updates in one matrix.
pub fn build_augmented(x: &DenseMatrix, lambda: f64) -> Result<DenseMatrix, TheoryError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(TheoryError::InvalidLambda {
            expected: "finite and positive",
            got: lambda,
        });
    }
    let (m, n) = (x.rows(), x.cols());
    let sq = lambda.sqrt();
    let mut a = DenseMatrix::zeros(m + n, m + n);
    for i in 0..m {
        a.set(i, i, sq);
        for j in 0..n {
            a.set(i, m + j, x.get(i, j));
            a.set(m + j, i, x.get(i, j));
        }
    }
    for j in 0..n {
        a.set(m + j, m + j, -sq);
    }
    Ok(a)
}

/// Spectral condition numbers `(cond_augmented, cond_gram)` of the
/// augmented system and of the regularized Gram matrix.
///
/// The square of the augmented matrix is block diagonal with blocks
/// `X X^T + lambda I` and `X^T X + lambda I`, so its singular values are
/// the square roots of both blocks' eigenvalues together. The reference
/// Gram is therefore taken over the larger of the two dimensions: its
/// spectrum (zero padding included) is exactly the squared spectrum of the
/// augmented matrix, which makes `cond_augmented = sqrt(cond_gram)` an
/// identity in every shape rather than only in the square case.
pub fn iz_condition_check(x: &DenseMatrix, lambda: f64) -> Result<(f64, f64), TheoryError> {
    let a = build_augmented(x, lambda)?;
    let eig_a = linalg::sym_eigenvalues(&a)?;
    let abs: Vec<f64> = eig_a.iter().map(|v| v.abs()).collect();
    let max_a = abs.iter().cloned().fold(0.0f64, f64::max);
    let min_a = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond_a = max_a / min_a;

    let gram = if x.cols() >= x.rows() {
        x.gram_primal(lambda)
    } else {
        x.gram_dual(lambda)
    };
    let eig_g = linalg::sym_eigenvalues(&gram)?;
    let cond_g = eig_g[eig_g.len() - 1] / eig_g[0];
    Ok((cond_a, cond_g))
}

/// Reference solutions of the regularized primal and dual systems for one
/// problem instance.
///
/// `beta_star` solves `(X^T X + lambda I) beta = X^T y`, `alpha_star`
/// solves `(X X^T + lambda I) alpha = y`, and the two sides are linked by
/// `beta_star = X^T alpha_star`. `alpha_prime_star` is the scaled dual
/// solution `sqrt(lambda) * alpha_star` used by the augmented solver.
#[derive(Debug, Clone)]
pub struct OracleSolutions {
    pub beta_star: DenseVector,
    pub alpha_star: DenseVector,
    pub alpha_prime_star: DenseVector,
}

/// Residual tolerance enforced on computed oracles, relative to `1 + |rhs|`.
pub const ORACLE_RESIDUAL_TOL: f64 = 1e-8;

impl OracleSolutions {
    /// Computes both reference solutions by one Cholesky solve on the
    /// smaller of the two regularized Gram systems; the other side is
    /// recovered through the exact coupling maps `beta = X^T alpha` and
    /// `alpha = (y - X beta) / lambda`.
    ///
    /// With `lambda = 0` the recovered side degenerates: the dual system
    /// is solved exactly only when columns outnumber rows (otherwise
    /// `alpha_star` is the minimum-norm preimage of `beta_star` under
    /// `X^T`), and `alpha_prime_star` collapses to zero.
    pub fn compute(
        x: &DenseMatrix,
        y: &DenseVector,
        lambda: f64,
    ) -> Result<Self, TheoryError> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(TheoryError::InvalidLambda {
                expected: "finite and nonnegative",
                got: lambda,
            });
        }
        let (m, n) = (x.rows(), x.cols());
        assert_eq!(y.len(), m, "right-hand side length mismatch");

        let (beta_star, alpha_star) = if n <= m {
            let gram = x.gram_primal(lambda);
            let xty = x.matvec_t(y);
            let beta = linalg::solve_spd(&gram, &xty)?;
            let alpha = if lambda > 0.0 {
                let mut r = y.clone();
                r.axpy(-1.0, &x.matvec(&beta));
                r.scale(1.0 / lambda);
                r
            } else {
                // Minimum-norm alpha with X^T alpha = beta: alpha = X w,
                // (X^T X) w = beta.
                let w = linalg::solve_spd(&gram, &beta)?;
                x.matvec(&w)
            };
            (beta, alpha)
        } else {
            let gram = x.gram_dual(lambda);
            let alpha = linalg::solve_spd(&gram, y)?;
            let beta = x.matvec_t(&alpha);
            (beta, alpha)
        };

        let mut alpha_prime_star = alpha_star.clone();
        alpha_prime_star.scale(lambda.sqrt());
        let oracle = Self {
            beta_star,
            alpha_star,
            alpha_prime_star,
        };
        oracle.validate(x, y, lambda)?;
        Ok(oracle)
    }

    /// Checks both defining residuals. The dual residual is skipped when
    /// `lambda = 0` and rows outnumber columns, where the dual system has
    /// no exact solution.
    pub fn validate(
        &self,
        x: &DenseMatrix,
        y: &DenseVector,
        lambda: f64,
    ) -> Result<(), TheoryError> {
        let xty = x.matvec_t(y);
        let mut primal = x.matvec_t(&x.matvec(&self.beta_star));
        primal.axpy(lambda, &self.beta_star);
        let primal_res = primal.sub(&xty).norm();
        let primal_bound = ORACLE_RESIDUAL_TOL * (1.0 + xty.norm());
        if primal_res > primal_bound {
            return Err(TheoryError::OracleValidation(format!(
                "primal residual {:.3e} above bound {:.3e}",
                primal_res, primal_bound
            )));
        }
        if lambda > 0.0 || x.cols() >= x.rows() {
            let mut dual = x.matvec(&x.matvec_t(&self.alpha_star));
            dual.axpy(lambda, &self.alpha_star);
            let dual_res = dual.sub(y).norm();
            let dual_bound = ORACLE_RESIDUAL_TOL * (1.0 + y.norm());
            if dual_res > dual_bound {
                return Err(TheoryError::OracleValidation(format!(
                    "dual residual {:.3e} above bound {:.3e}",
                    dual_res, dual_bound
                )));
            }
        }
        Ok(())
    }
}
