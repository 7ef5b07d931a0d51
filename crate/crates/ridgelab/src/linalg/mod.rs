//! Dense linear algebra sized for desk-scale solver experiments.
//!
//! Everything is `f64`, row-major, and allocation-explicit. The module
//! provides exactly what the solvers and the rate engine consume: matrix
//! and vector containers, weighted index sampling, a seeded deterministic
//! generator, SPD solves, symmetric eigenvalues, singular values, and
//! MatrixMarket array I/O.

mod decomp;
mod matrix;
mod mtx;
mod rng;
mod sampler;
mod vector;

pub use decomp::{singular_values, solve_spd, sym_eigenvalues};
pub use matrix::DenseMatrix;
pub use mtx::{read_matrix, read_vector, write_matrix, write_vector, MtxError};
pub use rng::{fnv1a64, splitmix64, SeededRng};
pub use sampler::WeightedSampler;
pub use vector::DenseVector;

use thiserror::Error;

/// Errors surfaced by construction and factorization routines.
///
/// Shape violations inside hot loops (mismatched slice lengths, indices
/// past the end) are programming errors and panic instead.
#[derive(Debug, Error, PartialEq)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("sampling weights must be nonnegative (weight {index} is {value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("sampling weights are all zero")]
    ZeroWeights,
    #[error("dimension {0} exceeds the eigensolver limit of {1}")]
    DimensionTooLarge(usize, usize),
    #[error("eigensolver failed to converge")]
    NoConvergence,
}

/// Dot product with four independent accumulators so the loop vectorizes.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot: slice lengths differ");
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`, elementwise over equal-length slices.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    assert_eq!(x.len(), y.len(), "axpy: slice lengths differ");
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Squared Euclidean norm of a slice.
#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Quadratic form `<z, M z>` for symmetric `M`.
///
/// `M` must be square, match `z` in dimension, and be symmetric to within
/// `1e-12` entrywise (relative to the larger of the paired entries and 1).
pub fn weighted_norm_sq(z: &DenseVector, m: &DenseMatrix) -> Result<f64, LinAlgError> {
    if m.rows() != m.cols() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "weighted_norm_sq needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if z.len() != m.rows() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "vector length {} does not match matrix dimension {}",
            z.len(),
            m.rows()
        )));
    }
    check_symmetric(m)?;
    let mz = m.matvec(z);
    Ok(dot(z.as_slice(), mz.as_slice()))
}

/// Entrywise symmetry check used by the quadratic-form and eigenvalue paths.
pub(crate) fn check_symmetric(m: &DenseMatrix) -> Result<(), LinAlgError> {
    for i in 0..m.rows() {
        for j in (i + 1)..m.cols() {
            let a = m.get(i, j);
            let b = m.get(j, i);
            let scale = 1.0f64.max(a.abs()).max(b.abs());
            if (a - b).abs() > 1e-12 * scale {
                return Err(LinAlgError::NotSymmetric);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_elementwise_sum() {
        let a: Vec<f64> = (0..13).map(|i| 0.5 + i as f64).collect();
        let b: Vec<f64> = (0..13).map(|i| 1.25 - i as f64 * 0.75).collect();
        let direct: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn axpy_matches_elementwise_update() {
        let x = [1.0, -2.0, 3.0];
        let mut y = [0.5, 0.5, 0.5];
        axpy(2.0, &x, &mut y);
        assert_eq!(y, [2.5, -3.5, 6.5]);
    }

    #[test]
    fn weighted_norm_rejects_asymmetry() {
        let m = DenseMatrix::new(2, 2, vec![1.0, 0.5, 0.4999, 1.0]).unwrap();
        let z = DenseVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(weighted_norm_sq(&z, &m), Err(LinAlgError::NotSymmetric));
    }

    #[test]
    fn weighted_norm_matches_direct_quadratic_form() {
        // 2x2 symmetric case evaluated by hand: z = (1, 2), M = [[2, 1], [1, 3]],
        // <z, Mz> = 1*(2+2) + 2*(1+6) = 18.
        let m = DenseMatrix::new(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let z = DenseVector::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(weighted_norm_sq(&z, &m).unwrap(), 18.0);
    }
}
