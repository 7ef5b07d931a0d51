//! Synthetic ridge-regression instances with a prescribed spectrum.
//!
//! An instance is `X = U S V^T` with Gaussian orthonormal factors and a
//! geometric singular-value ladder from 1 down to `sigma_min`, plus
//! observations `y = X beta_true + noise`. Knowing the spectrum exactly is
//! what lets the closed-form contraction factors be evaluated and checked
//! against measured convergence, and carrying the reference solutions on
//! the instance makes every error metric cheap to report.

use crate::linalg::{
    self, read_matrix, read_vector, write_matrix, write_vector, DenseMatrix, DenseVector,
    MtxError, SeededRng,
};
use crate::theory::{OracleSolutions, TheoryError};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("{0}")]
    InvalidParameter(String),
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error(transparent)]
    Mtx(#[from] MtxError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad metadata in {path} line {line}: {message}")]
    Metadata {
        path: String,
        line: usize,
        message: String,
    },
    #[error("instance validation failed: {0}")]
    Validation(String),
}

impl From<TheoryError> for ProblemError {
    fn from(e: TheoryError) -> Self {
        ProblemError::Validation(e.to_string())
    }
}

/// One regression problem: data, ground truth, regularization, and the
/// reference solutions of the regularized systems.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub x: DenseMatrix,
    pub y: DenseVector,
    /// Coefficients the observations were synthesized from. Descriptive:
    /// the solvers target the regularized solution, not this vector.
    pub beta_true: DenseVector,
    pub lambda: f64,
    /// Smallest prescribed singular value. Descriptive metadata for
    /// assembled or loaded instances, exact for generated ones.
    pub sigma_min: f64,
    pub seed: u64,
    pub oracle: OracleSolutions,
}

/// Geometric singular-value ladder `sigma_min^((i-1)/(k-1))` for
/// `i = 1..=k`, descending from 1 to `sigma_min`; a single value
/// degenerates to `[1.0]`.
pub fn prescribed_spectrum(k: usize, sigma_min: f64) -> Vec<f64> {
    assert!(k >= 1, "spectrum needs at least one value");
    if k == 1 {
        return vec![1.0];
    }
    (0..k)
        .map(|i| sigma_min.powf(i as f64 / (k - 1) as f64))
        .collect()
}

fn check_shape(m: usize, n: usize) -> Result<(), ProblemError> {
    if m == 0 || n == 0 {
        return Err(ProblemError::InvalidParameter(
            "dimensions must be at least 1".into(),
        ));
    }
    Ok(())
}

fn check_sigma_min(sigma_min: f64) -> Result<(), ProblemError> {
    if !(sigma_min > 0.0 && sigma_min <= 1.0) {
        return Err(ProblemError::InvalidParameter(
            "sigma-min must be in (0,1]".into(),
        ));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<(), ProblemError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(ProblemError::InvalidParameter(
            "lambda must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

/// Draws a Gaussian matrix and orthonormalizes its `k` columns by
/// modified Gram-Schmidt with one re-orthogonalization pass. Returns
/// column vectors, or `None` when a residual collapses (numerically
/// dependent draw).
fn orthonormal_columns(rows: usize, k: usize, rng: &mut SeededRng) -> Option<Vec<Vec<f64>>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut c = vec![0.0f64; rows];
        rng.fill_standard_normal(&mut c);
        let initial = linalg::norm_sq(&c).sqrt();
        for _pass in 0..2 {
            for q in &cols {
                let proj = linalg::dot(q, &c);
                linalg::axpy(-proj, q, &mut c);
            }
        }
        let norm = linalg::norm_sq(&c).sqrt();
        if !(norm > 1e-8 * initial) {
            return None;
        }
        let inv = 1.0 / norm;
        for v in &mut c {
            *v *= inv;
        }
        cols.push(c);
    }
    Some(cols)
}

/// Generates an `m x n` instance with spectrum descending from 1 to
/// `sigma_min`, `beta_true` and the noise standard normal, and the
/// reference solutions computed from the regularized Gram system.
///
/// All randomness derives from `seed`. A Gram-Schmidt breakdown (which a
/// Gaussian draw makes vanishingly rare) retries with a perturbed seed at
/// most three times before giving up.
pub fn generate(
    m: usize,
    n: usize,
    sigma_min: f64,
    lambda: f64,
    seed: u64,
) -> Result<ProblemInstance, ProblemError> {
    check_shape(m, n)?;
    check_sigma_min(sigma_min)?;
    check_lambda(lambda)?;

    let k = m.min(n);
    let spectrum = prescribed_spectrum(k, sigma_min);

    let mut factors = None;
    for attempt in 0u64..4 {
        let factor_seed = if attempt == 0 {
            seed
        } else {
            linalg::splitmix64(seed ^ attempt)
        };
        let mut rng = SeededRng::new(factor_seed).derive("factors");
        let u = orthonormal_columns(m, k, &mut rng);
        let v = orthonormal_columns(n, k, &mut rng);
        if let (Some(u), Some(v)) = (u, v) {
            factors = Some((u, v));
            break;
        }
    }
    let (u, v) = factors.ok_or_else(|| {
        ProblemError::GenerationFailed(format!(
            "orthonormal factors did not form after 4 attempts (seed {})",
            seed
        ))
    })?;

    // X = (U S) V^T, assembled as a row-major product against V's rows.
    let us = DenseMatrix::from_fn(m, k, |i, l| u[l][i] * spectrum[l]);
    let vmat = DenseMatrix::from_fn(n, k, |j, l| v[l][j]);
    let x = us.matmul_transb(&vmat);

    let mut model_rng = SeededRng::new(seed).derive("model");
    let beta_true = DenseVector::from_fn(n, |_| model_rng.standard_normal());
    let mut y = x.matvec(&beta_true);
    for i in 0..m {
        y[i] += model_rng.standard_normal();
    }

    let oracle = OracleSolutions::compute(&x, &y, lambda)?;
    Ok(ProblemInstance {
        x,
        y,
        beta_true,
        lambda,
        sigma_min,
        seed,
        oracle,
    })
}

impl ProblemInstance {
    /// Wraps externally supplied data into an instance, computing and
    /// validating the reference solutions. `sigma_min` and `beta_true`
    /// are carried as metadata; they need not describe `x`.
    pub fn assemble(
        x: DenseMatrix,
        y: DenseVector,
        beta_true: DenseVector,
        lambda: f64,
        sigma_min: f64,
        seed: u64,
    ) -> Result<ProblemInstance, ProblemError> {
        check_sigma_min(sigma_min)?;
        check_lambda(lambda)?;
        if y.len() != x.rows() {
            return Err(ProblemError::Validation(format!(
                "y has length {} but X has {} rows",
                y.len(),
                x.rows()
            )));
        }
        if beta_true.len() != x.cols() {
            return Err(ProblemError::Validation(format!(
                "beta_true has length {} but X has {} columns",
                beta_true.len(),
                x.cols()
            )));
        }
        let oracle = OracleSolutions::compute(&x, &y, lambda)?;
        Ok(ProblemInstance {
            x,
            y,
            beta_true,
            lambda,
            sigma_min,
            seed,
            oracle,
        })
    }

    /// Writes the instance as a directory of MatrixMarket files plus a
    /// `meta.txt` of `key=value` lines.
    pub fn save(&self, dir: &Path) -> Result<(), ProblemError> {
        fs::create_dir_all(dir).map_err(|e| ProblemError::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        write_matrix(&dir.join("X.mtx"), &self.x)?;
        write_vector(&dir.join("y.mtx"), &self.y)?;
        write_vector(&dir.join("beta_true.mtx"), &self.beta_true)?;
        let mut meta = String::new();
        let _ = writeln!(meta, "m={}", self.x.rows());
        let _ = writeln!(meta, "n={}", self.x.cols());
        let _ = writeln!(meta, "lambda={:.16e}", self.lambda);
        let _ = writeln!(meta, "sigma_min={:.16e}", self.sigma_min);
        let _ = writeln!(meta, "seed={}", self.seed);
        let meta_path = dir.join("meta.txt");
        fs::write(&meta_path, meta).map_err(|e| ProblemError::Io {
            path: meta_path.display().to_string(),
            source: e,
        })
    }

    /// Reads an instance directory back, recomputing the reference
    /// solutions and revalidating their residuals, so a corrupted or
    /// hand-edited instance fails here rather than in a solver.
    pub fn load(dir: &Path) -> Result<ProblemInstance, ProblemError> {
        let x = read_matrix(&dir.join("X.mtx"))?;
        let y = read_vector(&dir.join("y.mtx"))?;
        let beta_true = read_vector(&dir.join("beta_true.mtx"))?;
        let meta_path = dir.join("meta.txt");
        let text = fs::read_to_string(&meta_path).map_err(|e| ProblemError::Io {
            path: meta_path.display().to_string(),
            source: e,
        })?;

        let mut m = None;
        let mut n = None;
        let mut lambda = None;
        let mut sigma_min = None;
        let mut seed = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ProblemError::Metadata {
                path: meta_path.display().to_string(),
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key=value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "m" => {
                    m = Some(value.parse::<usize>().map_err(|e| err(e.to_string()))?);
                }
                "n" => {
                    n = Some(value.parse::<usize>().map_err(|e| err(e.to_string()))?);
                }
                "lambda" => {
                    lambda = Some(value.parse::<f64>().map_err(|e| err(e.to_string()))?);
                }
                "sigma_min" => {
                    sigma_min = Some(value.parse::<f64>().map_err(|e| err(e.to_string()))?);
                }
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|e| err(e.to_string()))?);
                }
                other => return Err(err(format!("unknown key '{}'", other))),
            }
        }
        let missing = |name: &str| ProblemError::Metadata {
            path: meta_path.display().to_string(),
            line: 0,
            message: format!("missing key '{}'", name),
        };
        let m = m.ok_or_else(|| missing("m"))?;
        let n = n.ok_or_else(|| missing("n"))?;
        let lambda = lambda.ok_or_else(|| missing("lambda"))?;
        let sigma_min = sigma_min.ok_or_else(|| missing("sigma_min"))?;
        let seed = seed.ok_or_else(|| missing("seed"))?;

        if x.rows() != m || x.cols() != n {
            return Err(ProblemError::Validation(format!(
                "metadata says {}x{} but X.mtx is {}x{}",
                m,
                n,
                x.rows(),
                x.cols()
            )));
        }
        ProblemInstance::assemble(x, y, beta_true, lambda, sigma_min, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn spectrum_ladder_hits_both_endpoints() {
        let s = prescribed_spectrum(4, 0.01);
        assert_eq!(s[0], 1.0);
        assert!((s[3] - 0.01).abs() < 1e-15);
        for w in s.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert_eq!(prescribed_spectrum(1, 0.5), vec![1.0]);
    }

    #[test]
    fn generated_spectrum_matches_the_prescription() {
        for (m, n) in [(10usize, 6usize), (6, 10), (7, 7)] {
            let p = generate(m, n, 0.05, 0.1, 42).unwrap();
            let mut want = prescribed_spectrum(m.min(n), 0.05);
            want.reverse();
            let got = linalg::singular_values(&p.x).unwrap();
            assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                assert!(
                    (g - w).abs() <= 1e-9 * (1.0 + w),
                    "{}x{}: singular value {} vs prescribed {}",
                    m,
                    n,
                    g,
                    w
                );
            }
        }
    }

    #[test]
    fn generated_frobenius_mass_equals_the_spectrum_mass() {
        let p = generate(9, 5, 0.3, 0.0, 7).unwrap();
        let want: f64 = prescribed_spectrum(5, 0.3).iter().map(|s| s * s).sum();
        assert!((p.x.frobenius_norm_sq() - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let a = generate(8, 3, 0.5, 0.01, 123).unwrap();
        let b = generate(8, 3, 0.5, 0.01, 123).unwrap();
        let c = generate(8, 3, 0.5, 0.01, 124).unwrap();
        assert_eq!(a.x.get(0, 0).to_bits(), b.x.get(0, 0).to_bits());
        assert_eq!(a.y[0].to_bits(), b.y[0].to_bits());
        assert_ne!(a.x.get(0, 0).to_bits(), c.x.get(0, 0).to_bits());
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(matches!(
            generate(4, 2, 0.0, 0.1, 1),
            Err(ProblemError::InvalidParameter(_))
        ));
        assert!(matches!(
            generate(4, 2, 1.5, 0.1, 1),
            Err(ProblemError::InvalidParameter(_))
        ));
        assert!(matches!(
            generate(4, 2, 0.5, -0.1, 1),
            Err(ProblemError::InvalidParameter(_))
        ));
        assert!(matches!(
            generate(0, 2, 0.5, 0.1, 1),
            Err(ProblemError::InvalidParameter(_))
        ));
    }

    #[test]
    fn save_and_load_round_trip_bitwise() {
        let dir = tempdir().unwrap();
        let p = generate(6, 4, 0.25, 0.05, 9).unwrap();
        p.save(dir.path()).unwrap();
        let q = ProblemInstance::load(dir.path()).unwrap();
        for i in 0..6 {
            for j in 0..4 {
                assert_eq!(p.x.get(i, j).to_bits(), q.x.get(i, j).to_bits());
            }
        }
        assert_eq!(p.y.as_slice(), q.y.as_slice());
        assert_eq!(p.beta_true.as_slice(), q.beta_true.as_slice());
        assert_eq!(p.lambda, q.lambda);
        assert_eq!(p.sigma_min, q.sigma_min);
        assert_eq!(p.seed, q.seed);
        // The oracle is recomputed from the loaded data and must land on
        // the same solution.
        let gap = p.oracle.beta_star.sub(&q.oracle.beta_star).norm();
        assert!(gap <= 1e-12 * (1.0 + p.oracle.beta_star.norm()));
    }

    #[test]
    fn load_rejects_tampered_metadata() {
        let dir = tempdir().unwrap();
        let p = generate(5, 3, 0.5, 0.1, 11).unwrap();
        p.save(dir.path()).unwrap();
        let meta = dir.path().join("meta.txt");
        let text = std::fs::read_to_string(&meta).unwrap();
        std::fs::write(&meta, text.replace("m=5", "m=6")).unwrap();
        assert!(matches!(
            ProblemInstance::load(dir.path()),
            Err(ProblemError::Validation(_))
        ));
        let text = std::fs::read_to_string(&meta).unwrap();
        std::fs::write(&meta, text.replace("m=6", "m=banana")).unwrap();
        assert!(matches!(
            ProblemInstance::load(dir.path()),
            Err(ProblemError::Metadata { .. })
        ));
    }

    #[test]
    fn load_rejects_missing_keys() {
        let dir = tempdir().unwrap();
        let p = generate(5, 3, 0.5, 0.1, 13).unwrap();
        p.save(dir.path()).unwrap();
        let meta = dir.path().join("meta.txt");
        let text = std::fs::read_to_string(&meta).unwrap();
        let without: String = text.lines().filter(|l| !l.starts_with("seed=")).fold(
            String::new(),
            |mut acc, l| {
                acc.push_str(l);
                acc.push('\n');
                acc
            },
        );
        std::fs::write(&meta, without).unwrap();
        assert!(matches!(
            ProblemInstance::load(dir.path()),
            Err(ProblemError::Metadata { .. })
        ));
    }

    #[test]
    fn assemble_rejects_mismatched_lengths() {
        let x = DenseMatrix::identity(3);
        let y = DenseVector::zeros(2);
        let bt = DenseVector::zeros(3);
        assert!(matches!(
            ProblemInstance::assemble(x, y, bt, 0.1, 1.0, 0),
            Err(ProblemError::Validation(_))
        ));
    }

    #[test]
    fn observations_are_signal_plus_noise() {
        // With beta_true known, y - X beta_true recovers the noise draw;
        // its norm should look like a standard normal sample, far from 0
        // and far from huge.
        let p = generate(200, 10, 0.5, 0.1, 17).unwrap();
        let mut noise = p.y.clone();
        noise.axpy(-1.0, &p.x.matvec(&p.beta_true));
        let norm_sq = noise.norm_sq();
        assert!(norm_sq > 100.0 && norm_sq < 400.0, "noise mass {}", norm_sq);
    }
}
