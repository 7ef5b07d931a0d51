use super::{check_symmetric, DenseMatrix, DenseVector, LinAlgError};

/// Largest dimension the dense Jacobi eigensolver accepts.
pub const EIGEN_DIM_LIMIT: usize = 2000;

const JACOBI_MAX_SWEEPS: usize = 60;

/// Off-diagonal Frobenius mass at termination, relative to the input's
/// Frobenius norm.
const JACOBI_OFF_TOL: f64 = 1e-11;

/// Solves `M x = b` for symmetric positive definite `M` by Cholesky
/// factorization with forward and back substitution.
pub fn solve_spd(m: &DenseMatrix, b: &DenseVector) -> Result<DenseVector, LinAlgError> {
    let n = m.rows();
    if m.cols() != n {
        return Err(LinAlgError::DimensionMismatch(format!(
            "solve_spd needs a square matrix, got {}x{}",
            n,
            m.cols()
        )));
    }
    if b.len() != n {
        return Err(LinAlgError::DimensionMismatch(format!(
            "right-hand side length {} does not match dimension {}",
            b.len(),
            n
        )));
    }
    check_symmetric(m)?;

    // Lower-triangular factor, row-major; row i holds L[i][0..=i].
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let partial = super::dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
            let s = m.get(i, j) - partial;
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(LinAlgError::NotPositiveDefinite);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }

    // L z = b.
    let mut z = vec![0.0f64; n];
    for i in 0..n {
        let partial = super::dot(&l[i * n..i * n + i], &z[..i]);
        z[i] = (b[i] - partial) / l[i * n + i];
    }
    // L^T x = z, accumulated column-wise so the sweep stays row-contiguous.
    let mut x = z;
    for i in (0..n).rev() {
        x[i] /= l[i * n + i];
        let xi = x[i];
        for j in 0..i {
            x[j] -= l[i * n + j] * xi;
        }
    }
    DenseVector::new(x).map_err(|_| LinAlgError::NotPositiveDefinite)
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
/// rotations. Terminates once the off-diagonal Frobenius mass falls below
/// `1e-11` of the input's Frobenius norm.
pub fn sym_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>, LinAlgError> {
    let n = m.rows();
    if m.cols() != n {
        return Err(LinAlgError::DimensionMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            n,
            m.cols()
        )));
    }
    if n > EIGEN_DIM_LIMIT {
        return Err(LinAlgError::DimensionTooLarge(n, EIGEN_DIM_LIMIT));
    }
    check_symmetric(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut a: Vec<f64> = (0..n * n).map(|k| m.get(k / n, k % n)).collect();
    let fro = super::norm_sq(&a).sqrt();
    let tol = JACOBI_OFF_TOL * fro;
    if fro == 0.0 {
        return Ok(vec![0.0; n]);
    }
    // Rotations on pairs below this magnitude cannot push the total
    // off-diagonal mass above tol, so they are skipped.
    let skip = tol / n as f64;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off_sq = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let v = a[p * n + q];
                off_sq += 2.0 * v * v;
            }
        }
        if off_sq.sqrt() <= tol {
            let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
            return Ok(eig);
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= skip {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    Err(LinAlgError::NoConvergence)
}

/// Singular values of `x`, ascending, of length `min(rows, cols)`.
///
/// Computed as square roots of the eigenvalues of the smaller Gram matrix;
/// eigenvalues driven negative by roundoff are clamped to zero.
pub fn singular_values(x: &DenseMatrix) -> Result<Vec<f64>, LinAlgError> {
    let k = x.rows().min(x.cols());
    if k == 0 {
        return Ok(Vec::new());
    }
    let gram = if x.rows() >= x.cols() {
        x.gram_primal(0.0)
    } else {
        x.gram_dual(0.0)
    };
    let eig = sym_eigenvalues(&gram)?;
    Ok(eig.into_iter().map(|v| v.max(0.0).sqrt()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SeededRng;

    fn random_spd(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = SeededRng::new(seed);
        let a = DenseMatrix::from_fn(n, n, |_, _| rng.standard_normal());
        a.gram_primal(1.0)
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let m = DenseMatrix::identity(3);
        let b = DenseVector::new(vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(solve_spd(&m, &b).unwrap().as_slice(), b.as_slice());
    }

    #[test]
    fn two_by_two_solve_against_explicit_inverse() {
        // M = [[4,1],[1,3]], det 11, x = M^{-1} (1,2) = (1/11, 7/11).
        let m = DenseMatrix::new(2, 2, vec![4.0, 1.0, 1.0, 3.0]).unwrap();
        let b = DenseVector::new(vec![1.0, 2.0]).unwrap();
        let x = solve_spd(&m, &b).unwrap();
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-14);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_indefinite_and_semidefinite_inputs() {
        let indefinite = DenseMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        let b = DenseVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(
            solve_spd(&indefinite, &b),
            Err(LinAlgError::NotPositiveDefinite)
        );
        let semi = DenseMatrix::new(2, 2, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(solve_spd(&semi, &b), Err(LinAlgError::NotPositiveDefinite));
    }

    #[test]
    fn solve_residual_stays_within_contract() {
        for (n, seed) in [(5usize, 1u64), (20, 2), (50, 3)] {
            let m = random_spd(n, seed);
            let mut rng = SeededRng::new(seed + 100);
            let b = DenseVector::from_fn(n, |_| rng.standard_normal());
            let x = solve_spd(&m, &b).unwrap();
            let r = m.matvec(&x).sub(&b).norm();
            let bound = 1e-8 * (m.frobenius_norm_sq().sqrt() * x.norm() + b.norm());
            assert!(r <= bound, "residual {} above bound {}", r, bound);
        }
    }

    #[test]
    fn diagonal_eigenvalues_sort_ascending() {
        let m = DenseMatrix::new(3, 3, vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(sym_eigenvalues(&m).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_eigenvalues_in_closed_form() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = DenseMatrix::new(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let eig = sym_eigenvalues(&m).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_preserve_trace_and_frobenius_mass() {
        for (n, seed) in [(8usize, 5u64), (40, 6)] {
            let m = random_spd(n, seed);
            let eig = sym_eigenvalues(&m).unwrap();
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            let eig_sum: f64 = eig.iter().sum();
            assert!((trace - eig_sum).abs() <= 1e-9 * trace.abs().max(1.0));
            let fro_sq = m.frobenius_norm_sq();
            let eig_sq: f64 = eig.iter().map(|v| v * v).sum();
            assert!((fro_sq - eig_sq).abs() <= 1e-9 * fro_sq.max(1.0));
        }
    }

    #[test]
    fn eigensolver_enforces_dimension_cap() {
        let m = DenseMatrix::zeros(EIGEN_DIM_LIMIT + 1, EIGEN_DIM_LIMIT + 1);
        assert_eq!(
            sym_eigenvalues(&m),
            Err(LinAlgError::DimensionTooLarge(
                EIGEN_DIM_LIMIT + 1,
                EIGEN_DIM_LIMIT
            ))
        );
    }

    #[test]
    fn eigensolver_rejects_asymmetric_input() {
        let m = DenseMatrix::new(2, 2, vec![1.0, 0.5, 0.0, 1.0]).unwrap();
        assert_eq!(sym_eigenvalues(&m), Err(LinAlgError::NotSymmetric));
    }

    #[test]
    fn singular_values_of_padded_diagonal() {
        // [[2,0],[0,1],[0,0]] has singular values {1, 2}.
        let x = DenseMatrix::new(3, 2, vec![2.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let sv = singular_values(&x).unwrap();
        assert!((sv[0] - 1.0).abs() < 1e-12);
        assert!((sv[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_values_agree_across_orientation() {
        let mut rng = SeededRng::new(31);
        let x = DenseMatrix::from_fn(4, 6, |_, _| rng.standard_normal());
        let xt = DenseMatrix::from_fn(6, 4, |i, j| x.get(j, i));
        let a = singular_values(&x).unwrap();
        let b = singular_values(&xt).unwrap();
        assert_eq!(a.len(), 4);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-10 * u.max(1.0));
        }
        let fro: f64 = x.frobenius_norm_sq();
        let sv_sq: f64 = a.iter().map(|s| s * s).sum();
        assert!((fro - sv_sq).abs() <= 1e-9 * fro.max(1.0));
    }
}
