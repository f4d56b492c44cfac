//! Deterministic random streams.
//!
//! [`RngStream`] wraps ChaCha8 (the `rand_chacha` implementation, 64-bit
//! seed expanded through `SeedableRng::seed_from_u64`). A stream is named
//! by a `(seed, stream_id)` pair; ChaCha's 64-bit stream counter keeps
//! distinct ids on disjoint keystreams.
//!
//! Bounded draws use Lemire's widening-multiply method with rejection, so
//! every value in the range is exactly equally likely.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Stream id used for the sorting algorithm's own choices.
pub const ALGORITHM_STREAM: u64 = 0;
/// Stream id used for input generation.
pub const INPUT_STREAM: u64 = 1;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    position: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::derive(seed, ALGORITHM_STREAM)
    }

    pub fn derive(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            position: 0,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of raw 64-bit words drawn so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn next_u64(&mut self) -> u64 {
        self.position += 1;
        self.inner.next_u64()
    }

    /// Uniform integer in `[lo, hi]`.
    ///
    /// A single-point range returns `lo` without consuming a draw.
    pub fn uniform_in_range(&mut self, lo: i64, hi: i64) -> Result<i64> {
        if lo > hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        let span = hi.wrapping_sub(lo) as u64;
        if span == u64::MAX {
            return Ok(self.next_u64() as i64);
        }
        Ok(lo.wrapping_add(self.below(span + 1) as i64))
    }

    /// Uniform `usize` in `[lo, hi]`; callers guarantee `lo <= hi`.
    #[inline]
    pub(crate) fn index_in(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as usize
    }

    /// Uniform in `[0, bound)`, `bound >= 1`.
    #[inline]
    fn below(&mut self, bound: u64) -> u64 {
        if bound == 1 {
            return 0;
        }
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let wide = (self.next_u64() as u128) * (bound as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }
}

/// SplitMix64 finalizer; mixes a word into a well-spread 64-bit value.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one bench trial, derived from the master seed, array size and
/// trial index.
pub fn trial_seed(master: u64, size: usize, trial: u64) -> u64 {
    mix64(mix64(mix64(master) ^ size as u64) ^ trial)
}

/// Seed from OS entropy; only used when the caller gives no seed.
pub fn entropy_seed() -> u64 {
    use rand_core::{OsRng, TryRngCore};
    OsRng.try_next_u64().unwrap_or_else(|_| {
        let nanos = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        mix64(nanos ^ std::process::id() as u64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_range() {
        let mut rng = RngStream::new(99);
        assert_eq!(rng.uniform_in_range(5, 5).unwrap(), 5);
        assert_eq!(rng.position(), 0);
    }

    #[test]
    fn inverted_range_is_an_error() {
        let mut rng = RngStream::new(0);
        assert!(matches!(
            rng.uniform_in_range(7, 3),
            Err(Error::InvalidRange { lo: 7, hi: 3 })
        ));
    }

    #[test]
    fn chi_square_on_eight_bins() {
        // 7 degrees of freedom: mean 7, sd sqrt(14). Reject beyond 4 sd.
        let draws = 100_000u64;
        let mut rng = RngStream::new(1);
        let mut bins = [0u64; 8];
        for _ in 0..draws {
            let v = rng.uniform_in_range(1, 8).unwrap();
            assert!((1..=8).contains(&v));
            bins[(v - 1) as usize] += 1;
        }
        let expected = draws as f64 / 8.0;
        let chi2: f64 = bins
            .iter()
            .map(|&b| (b as f64 - expected).powi(2) / expected)
            .sum();
        let limit = 7.0 + 4.0 * 14f64.sqrt();
        assert!(chi2 < limit, "chi2 = {chi2}, bins = {bins:?}");
        // Each bin within 4 sigma of its binomial mean.
        let sigma = (draws as f64 * (1.0 / 8.0) * (7.0 / 8.0)).sqrt();
        for b in bins {
            assert!((b as f64 - expected).abs() < 4.0 * sigma, "{bins:?}");
        }
    }

    #[test]
    fn extreme_ranges() {
        let mut rng = RngStream::new(3);
        for _ in 0..100 {
            let v = rng.uniform_in_range(i64::MIN, i64::MAX).unwrap();
            let _ = v;
            let w = rng.uniform_in_range(i64::MAX - 1, i64::MAX).unwrap();
            assert!(w >= i64::MAX - 1);
            let x = rng.uniform_in_range(-3, -1).unwrap();
            assert!((-3..=-1).contains(&x));
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut r = RngStream::derive(42, 7);
            (0..16).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::derive(42, 7);
            (0..16).map(|_| r.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut r = RngStream::derive(42, 8);
            (0..16).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn trial_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..4)
            .flat_map(|size| (0..50).map(move |t| trial_seed(9, size, t)))
            .collect();
        assert_eq!(s.len(), 200);
    }
}
