use super::{DenseVector, LinAlgError};

/// Row-major dense matrix.
///
/// Rows are contiguous, so row access is a slice borrow and column access
/// walks the data with stride `cols`. Entries are validated finite at
/// construction and deserialization.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Wraps `data` laid out row-major. Rejects length mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinAlgError> {
        if data.len() != rows * cols {
            return Err(LinAlgError::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinAlgError::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` as a contiguous slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        assert!(i < self.rows, "row index {} out of range {}", i, self.rows);
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        super::norm_sq(self.row(i))
    }

    pub fn col_norm_sq(&self, j: usize) -> f64 {
        assert!(j < self.cols, "column index {} out of range {}", j, self.cols);
        let mut acc = 0.0;
        for i in 0..self.rows {
            let v = self.data[i * self.cols + j];
            acc += v * v;
        }
        acc
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        super::norm_sq(&self.data)
    }

    /// Dot product of row `i` with `v` (length `cols`).
    #[inline]
    pub fn row_dot(&self, i: usize, v: &[f64]) -> f64 {
        super::dot(self.row(i), v)
    }

    /// `y += alpha * row_i`, with `y` of length `cols`.
    #[inline]
    pub fn row_axpy(&self, i: usize, alpha: f64, y: &mut [f64]) {
        super::axpy(alpha, self.row(i), y);
    }

    /// Dot product of column `j` with `v` (length `rows`).
    pub fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        assert!(j < self.cols, "column index {} out of range {}", j, self.cols);
        assert_eq!(v.len(), self.rows, "col_dot: vector length mismatch");
        let mut acc = 0.0;
        let mut idx = j;
        for vi in v {
            acc += self.data[idx] * vi;
            idx += self.cols;
        }
        acc
    }

    /// `y += alpha * column_j`, with `y` of length `rows`.
    pub fn col_axpy(&self, j: usize, alpha: f64, y: &mut [f64]) {
        assert!(j < self.cols, "column index {} out of range {}", j, self.cols);
        assert_eq!(y.len(), self.rows, "col_axpy: vector length mismatch");
        let mut idx = j;
        for yi in y.iter_mut() {
            *yi += alpha * self.data[idx];
            idx += self.cols;
        }
    }

    /// `X v` for `v` of length `cols`.
    pub fn matvec(&self, v: &DenseVector) -> DenseVector {
        assert_eq!(v.len(), self.cols, "matvec: vector length mismatch");
        DenseVector::from_fn(self.rows, |i| self.row_dot(i, v.as_slice()))
    }

    /// `X^T v` for `v` of length `rows`.
    pub fn matvec_t(&self, v: &DenseVector) -> DenseVector {
        assert_eq!(v.len(), self.rows, "matvec_t: vector length mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            super::axpy(v[i], self.row(i), &mut out);
        }
        DenseVector::new(out).expect("finite inputs produce finite output")
    }

    /// `X^T X + lambda I`, the `cols x cols` regularized primal Gram matrix.
    pub fn gram_primal(&self, lambda: f64) -> DenseMatrix {
        let n = self.cols;
        let mut g = DenseMatrix::zeros(n, n);
        // Accumulate the upper triangle row by row, then mirror.
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..n {
                let c = row[j];
                if c != 0.0 {
                    let base = j * n;
                    let dst = &mut g.data[base + j..base + n];
                    super::axpy(c, &row[j..], dst);
                }
            }
        }
        for j in 0..n {
            for l in (j + 1)..n {
                let v = g.data[j * n + l];
                g.data[l * n + j] = v;
            }
            g.data[j * n + j] += lambda;
        }
        g
    }

    /// `X X^T + lambda I`, the `rows x rows` regularized dual Gram matrix.
    pub fn gram_dual(&self, lambda: f64) -> DenseMatrix {
        let m = self.rows;
        let mut g = DenseMatrix::zeros(m, m);
        for i in 0..m {
            let ri = self.row(i);
            for l in i..m {
                let v = super::dot(ri, self.row(l));
                g.data[i * m + l] = v;
                g.data[l * m + i] = v;
            }
        }
        for i in 0..m {
            g.data[i * m + i] += lambda;
        }
        g
    }

    /// `self * other^T`, pairing rows of both operands. `self` is `m x k`,
    /// `other` is `n x k`, the result is `m x n`.
    pub fn matmul_transb(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(
            self.cols, other.cols,
            "matmul_transb: inner dimensions differ"
        );
        DenseMatrix::from_fn(self.rows, other.rows, |i, j| {
            super::dot(self.row(i), other.row(j))
        })
    }
}
