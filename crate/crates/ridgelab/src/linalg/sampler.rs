use super::{LinAlgError, SeededRng};

/// Discrete sampler over nonnegative weights, proportional to weight.
///
/// Construction compacts the weight array to its positive entries and
/// stores their strictly increasing prefix sums. A draw maps a uniform
/// `u` from `(0, 1]` to the first kept index whose cumulative weight
/// reaches `u * total`, so an entry with zero weight is never produced
/// and each kept index `i` is chosen exactly when
/// `cumulative[i-1] < u * total <= cumulative[i]`.
#[derive(Debug, Clone)]
pub struct WeightedSampler {
    source_len: usize,
    kept: Vec<usize>,
    cumulative: Vec<f64>,
    total: f64,
}

impl WeightedSampler {
    /// Builds a sampler over `weights`. Negative or non-finite weights are
    /// rejected, as is a weight vector with zero total mass.
    pub fn new(weights: &[f64]) -> Result<Self, LinAlgError> {
        let mut kept = Vec::new();
        let mut cumulative = Vec::new();
        let mut running = 0.0f64;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(LinAlgError::NonFinite(i));
            }
            if w < 0.0 {
                return Err(LinAlgError::NegativeWeight { index: i, value: w });
            }
            let next = running + w;
            // A weight too small to advance the running sum is treated as
            // zero; keeping it would break the strict monotonicity the
            // binary search relies on.
            if w > 0.0 && next > running {
                kept.push(i);
                cumulative.push(next);
                running = next;
            }
        }
        if kept.is_empty() {
            return Err(LinAlgError::ZeroWeights);
        }
        Ok(Self {
            source_len: weights.len(),
            kept,
            cumulative,
            total: running,
        })
    }

    /// Length of the weight vector the sampler was built over.
    pub fn len(&self) -> usize {
        self.source_len
    }

    pub fn is_empty(&self) -> bool {
        self.source_len == 0
    }

    /// Total weight mass.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Prefix sums over the kept (positive) weights, strictly increasing.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Original indices of the kept weights, ascending.
    pub fn kept_indices(&self) -> &[usize] {
        &self.kept
    }

    /// Selection probability of original index `i`.
    pub fn probability(&self, i: usize) -> f64 {
        match self.kept.binary_search(&i) {
            Ok(pos) => {
                let lo = if pos == 0 { 0.0 } else { self.cumulative[pos - 1] };
                (self.cumulative[pos] - lo) / self.total
            }
            Err(_) => 0.0,
        }
    }

    /// Draws one index proportional to weight.
    pub fn sample(&self, rng: &mut SeededRng) -> usize {
        let target = rng.uniform_open01() * self.total;
        let pos = self.cumulative.partition_point(|&c| c < target);
        // target <= total guarantees pos < len except for rounding at the
        // very top of the range; clamp keeps the draw valid either way.
        self.kept[pos.min(self.kept.len() - 1)]
    }
}
