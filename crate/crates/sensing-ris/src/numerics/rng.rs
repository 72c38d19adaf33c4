//! Reproducible random sampling.
//!
//! Monte-Carlo results must be byte-identical regardless of thread count, so
//! every trial (and every RIS element inside a trial) draws from its own
//! ChaCha substream addressed by (seed, stream index) instead of sharing one
//! sequential generator.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A ChaCha8 generator tagged with its (seed, stream) address.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    /// A fresh generator on the same seed but an independent stream; the
    /// returned generator starts at the beginning of that stream no matter
    /// how much this one has consumed.
    pub fn substream(&self, stream: u64) -> Self {
        Self::with_stream(self.seed, stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// Draw from the circularly-symmetric complex Gaussian CN(mean, variance):
/// real and imaginary parts are independent with variance/2 each.
pub fn sample_complex_gaussian(rng: &mut SeededRng, mean: Complex64, variance: f64) -> Complex64 {
    debug_assert!(variance >= 0.0);
    if variance == 0.0 {
        return mean;
    }
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    mean + Complex64::new(s * re, s * im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_address_same_sequence() {
        let mut a = SeededRng::with_stream(42, 7);
        let mut b = SeededRng::with_stream(42, 7);
        for _ in 0..64 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn substream_ignores_parent_position() {
        let mut parent = SeededRng::new(9);
        let fresh = parent.substream(3);
        let _burn: u64 = parent.next_u64();
        let later = parent.substream(3);
        let mut x = fresh.clone();
        let mut y = later.clone();
        for _ in 0..16 {
            assert_eq!(x.next_u64(), y.next_u64());
        }
    }

    #[test]
    fn different_streams_differ() {
        let mut a = SeededRng::with_stream(1, 0);
        let mut b = SeededRng::with_stream(1, 1);
        let same = (0..32).filter(|_| a.next_u64() == b.next_u64()).count();
        assert!(same < 2);
    }

    #[test]
    fn zero_variance_returns_mean() {
        let mut rng = SeededRng::new(5);
        let m = Complex64::new(1.25, -0.5);
        assert_eq!(sample_complex_gaussian(&mut rng, m, 0.0), m);
    }

    #[test]
    fn moments_match() {
        let mut rng = SeededRng::new(11);
        let n = 1_000_000;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = sample_complex_gaussian(&mut rng, Complex64::new(2.0, 0.0), 1.0);
            sum += z;
            let d = z - Complex64::new(2.0, 0.0);
            sum_sq += d.norm_sqr();
        }
        let mean = sum / n as f64;
        // SE of each part is sqrt(0.5/n), SE of |z-mu|^2 mean is 1/sqrt(n)
        assert!((mean.re - 2.0).abs() < 3.0 * (0.5 / n as f64).sqrt());
        assert!(mean.im.abs() < 3.0 * (0.5 / n as f64).sqrt());
        assert!((sum_sq / n as f64 - 1.0).abs() < 3.0 / (n as f64).sqrt());
    }
}
