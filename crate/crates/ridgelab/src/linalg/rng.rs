use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Seeded deterministic random source.
///
/// Wraps a ChaCha12 stream cipher generator: the same seed yields the same
/// draw sequence on every platform. Derived streams (see [`SeededRng::derive`])
/// give independent substreams a stable identity, so concurrent consumers
/// never share or race a generator.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha12Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// The seed this stream was constructed with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw from the half-open interval `(0, 1]`.
    ///
    /// The open lower end means a draw scaled by a cumulative-weight total
    /// can never land at exactly zero, which keeps zero-weight sampler
    /// entries unreachable.
    #[inline]
    pub fn uniform_open01(&mut self) -> f64 {
        1.0 - self.inner.random::<f64>()
    }

    /// Standard normal draw.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Fills `out` with independent standard normal draws.
    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.standard_normal();
        }
    }

    /// New stream keyed by `label`, independent of this stream's position.
    ///
    /// The derived seed is `splitmix64(seed XOR fnv1a64(label))`, so the
    /// mapping depends only on the parent seed and the label text.
    pub fn derive(&self, label: &str) -> SeededRng {
        SeededRng::new(splitmix64(self.seed ^ fnv1a64(label.as_bytes())))
    }
}

/// SplitMix64 finalizer: a fixed bijective scrambler on `u64`, used to turn
/// structured seed material (XORed ids, counters) into well-mixed seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a 64-bit hash of a byte string. Stable across platforms and builds;
/// used to key derived generator streams and grid-cell seeds.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}
