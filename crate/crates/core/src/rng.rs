//! Seedable counter-based random streams.
//!
//! Every stochastic routine takes a caller-owned generator. Monte Carlo
//! estimators that can be fanned out across workers instead take a master
//! seed and give sample `i` its own substream `stream(master, i)`, so the
//! result does not depend on how samples are distributed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Substream `id` of the generator keyed by `master`.
///
/// ChaCha keeps a 64-bit stream selector next to its block counter, so
/// distinct ids give non-overlapping sequences under the same key.
pub fn stream(master: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(id);
    rng
}

#[inline]
pub fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.gen::<f64>() < p
    }
}

/// Exponential variate by inversion.
#[inline]
pub fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.gen();
    -libm::log1p(-u) / rate
}

#[inline]
pub fn uniform_index<R: Rng + ?Sized>(rng: &mut R, len: usize) -> usize {
    rng.gen_range(0..len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a: [u64; 4] = core::array::from_fn(|_| stream(7, 3).next_u64());
        let mut s = stream(7, 3);
        let b: [u64; 4] = core::array::from_fn(|_| s.next_u64());
        assert_eq!(a[0], b[0]);
        let mut other = stream(7, 4);
        assert_ne!(b[0], other.next_u64());
    }

    #[test]
    fn degenerate_bernoulli() {
        let mut rng = stream(1, 0);
        assert!((0..100).all(|_| bernoulli(&mut rng, 1.0)));
        assert!((0..100).all(|_| !bernoulli(&mut rng, 0.0)));
    }

    #[test]
    fn exponential_mean_is_inverse_rate() {
        let mut rng = stream(11, 0);
        let n = 100_000;
        let mean = (0..n).map(|_| exponential(&mut rng, 2.0)).sum::<f64>() / n as f64;
        // sd of the mean is 0.5 / sqrt(n)
        assert!((mean - 0.5).abs() < 4.0 * 0.5 / libm::sqrt(n as f64));
    }
}
