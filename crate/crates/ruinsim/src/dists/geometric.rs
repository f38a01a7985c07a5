//! Geometric law on {0, 1, 2, ...} with P(G = k) = p (1-p)^k.

use super::{DistError, RngStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricLaw {
    success: f64,
}

impl GeometricLaw {
    pub fn new(success: f64) -> Result<Self, DistError> {
        if !(success > 0.0 && success <= 1.0) {
            return Err(DistError::InvalidParameter {
                name: "p",
                reason: format!("success probability must lie in (0,1], got {success}"),
            });
        }
        Ok(Self { success })
    }

    pub fn success(&self) -> f64 {
        self.success
    }

    pub fn mean(&self) -> f64 {
        (1.0 - self.success) / self.success
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.success * (1.0 - self.success).powi(k as i32)
    }

    /// Inversion sample: floor(ln U / ln(1 - p)).
    pub fn sample(&self, rng: &mut RngStream) -> u64 {
        if self.success >= 1.0 {
            return 0;
        }
        let u = rng.uniform();
        let k = (u.ln() / (-self.success).ln_1p()).floor();
        if k < 0.0 {
            0
        } else {
            k as u64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_success_is_zero() {
        let g = GeometricLaw::new(1.0).unwrap();
        let mut rng = RngStream::substream(1, 0);
        for _ in 0..100 {
            assert_eq!(g.sample(&mut rng), 0);
        }
    }

    #[test]
    fn empirical_mean_at_series_success_probability() {
        // p = (1 - 0.99)/0.2575, the geometric success of the discard series
        // at the reference parameters; mean (1-p)/p = 24.75.
        let p = 0.01 / 0.2575;
        let g = GeometricLaw::new(p).unwrap();
        assert!((g.mean() - 24.75).abs() < 1e-10);
        let mut rng = RngStream::substream(18, 0);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| g.sample(&mut rng) as f64).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let stderr = (var / n as f64).sqrt();
        assert!((mean - 24.75).abs() < 4.0 * stderr, "mean {mean} ± {stderr}");
    }

    #[test]
    fn half_mass_at_zero_for_fair_coin() {
        let g = GeometricLaw::new(0.5).unwrap();
        let mut rng = RngStream::substream(3, 0);
        let n = 100_000;
        let zeros = (0..n).filter(|_| g.sample(&mut rng) == 0).count();
        let phat = zeros as f64 / n as f64;
        let stderr = (0.25 / n as f64).sqrt();
        assert!((phat - 0.5).abs() < 4.0 * stderr);
    }

    #[test]
    fn pmf_matches_empirical_masses() {
        let g = GeometricLaw::new(0.3).unwrap();
        let mut rng = RngStream::substream(4, 0);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let k = g.sample(&mut rng);
            if (k as usize) < counts.len() {
                counts[k as usize] += 1;
            }
        }
        for (k, c) in counts.iter().enumerate() {
            let want = g.pmf(k as u64);
            let phat = *c as f64 / n as f64;
            let stderr = (want * (1.0 - want) / n as f64).sqrt();
            assert!((phat - want).abs() < 4.0 * stderr, "k={k}: {phat} vs {want}");
        }
    }

    #[test]
    fn rejects_invalid_success() {
        assert!(GeometricLaw::new(0.0).is_err());
        assert!(GeometricLaw::new(-0.2).is_err());
        assert!(GeometricLaw::new(1.5).is_err());
    }
}
