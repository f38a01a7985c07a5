//! Deterministic pseudo-random streams.
//!
//! A stream is keyed by (master seed, stream index). The index selects a
//! ChaCha stream under a key expanded from the seed, so replications can be
//! assigned disjoint streams whose output never depends on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random stream. Identical (seed, index) pairs produce
/// identical draw sequences on every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Stream `index` under `master_seed`.
    pub fn substream(master_seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(index);
        Self { rng }
    }

    /// Uniform draw on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Exponential draw with the given rate.
    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        debug_assert!(rate > 0.0);
        -self.uniform().ln() / rate
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() <= p
    }

    /// Index into a probability vector (linear scan; the vectors here have a
    /// handful of entries).
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u <= acc {
                return i;
            }
        }
        probs.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_stream() {
        let mut a = RngStream::substream(42, 0);
        let mut b = RngStream::substream(42, 0);
        for _ in 0..100 {
            assert_eq!(a.uniform(), b.uniform());
        }
    }

    #[test]
    fn different_indices_differ() {
        let mut a = RngStream::substream(42, 0);
        let mut b = RngStream::substream(42, 1);
        let draws_a: Vec<f64> = (0..100).map(|_| a.uniform()).collect();
        let draws_b: Vec<f64> = (0..100).map(|_| b.uniform()).collect();
        assert_ne!(draws_a, draws_b);
    }

    #[test]
    fn uniform_mean_is_half() {
        let mut s = RngStream::substream(7, 3);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| s.uniform()).sum::<f64>() / n as f64;
        // stderr of the mean of U(0,1) is 1/sqrt(12 n)
        let stderr = (1.0 / 12.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * stderr, "mean {mean}");
    }

    #[test]
    fn paired_streams_uncorrelated() {
        let mut a = RngStream::substream(123, 0);
        let mut b = RngStream::substream(123, 1);
        let n = 10_000;
        let (mut sa, mut sb, mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let x = a.uniform();
            let y = b.uniform();
            sa += x;
            sb += y;
            sab += x * y;
            saa += x * x;
            sbb += y * y;
        }
        let nf = n as f64;
        let cov = sab / nf - sa / nf * (sb / nf);
        let var_a = saa / nf - (sa / nf).powi(2);
        let var_b = sbb / nf - (sb / nf).powi(2);
        let corr = cov / (var_a * var_b).sqrt();
        assert!(corr.abs() < 0.05, "corr {corr}");
    }

    #[test]
    fn exponential_mean() {
        let mut s = RngStream::substream(5, 0);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| s.exponential(2.0)).sum::<f64>() / n as f64;
        let stderr = 0.5 / (n as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * stderr);
    }
}
