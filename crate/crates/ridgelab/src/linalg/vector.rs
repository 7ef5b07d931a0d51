use super::LinAlgError;
use std::ops::{Index, IndexMut};

/// Contiguous `f64` vector. Entries are validated finite at construction;
/// in-place arithmetic afterwards is the caller's responsibility.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    data: Vec<f64>,
}

impl DenseVector {
    /// Wraps `data`, rejecting NaN and infinities.
    pub fn new(data: Vec<f64>) -> Result<Self, LinAlgError> {
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinAlgError::NonFinite(pos));
        }
        Ok(Self { data })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            data: vec![0.0; len],
        }
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            data: (0..len).map(f).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn dot(&self, other: &DenseVector) -> f64 {
        super::dot(&self.data, &other.data)
    }

    pub fn norm_sq(&self) -> f64 {
        super::norm_sq(&self.data)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &DenseVector) {
        super::axpy(alpha, &other.data, &mut self.data);
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.data {
            *v *= alpha;
        }
    }

    /// Returns `self - other` as a new vector.
    pub fn sub(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.len(), other.len(), "sub: lengths differ");
        DenseVector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for DenseVector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        assert_eq!(
            DenseVector::new(vec![1.0, f64::NAN]),
            Err(LinAlgError::NonFinite(1))
        );
        assert_eq!(
            DenseVector::new(vec![f64::INFINITY]),
            Err(LinAlgError::NonFinite(0))
        );
    }

    #[test]
    fn norm_and_sub_small_case() {
        let a = DenseVector::new(vec![3.0, 4.0]).unwrap();
        let b = DenseVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.sub(&b).as_slice(), &[2.0, 3.0]);
    }
}
