//! Random subset sampling.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// Each index of `0..n` independently with probability `p`, returned in
/// increasing order.
///
/// Draws the subset size from `Binomial(n, p)` and then a uniform subset of
/// that size, which has exactly the same law as `n` independent coin flips
/// but costs time proportional to the output.
pub fn binomial_subset<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<usize> {
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
    if n == 0 || p == 0.0 {
        return Vec::new();
    }
    if p == 1.0 {
        return (0..n).collect();
    }
    let k = binomial(n as u64, p, rng) as usize;
    let mut picked = index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    picked
}

/// A draw from `Binomial(n, p)`.
pub fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p)
        .expect("p lies in (0, 1)")
        .sample(rng)
}

/// 64 independent Bernoulli(`p`) bits.
///
/// Each lane compares a lazily generated uniform `U` against the binary
/// expansion of `p` (truncated to 64 bits), one random word per digit, and
/// stops once every lane has differed from `p` at some digit. The expected
/// number of words consumed is about `log2(64) + 2`.
#[inline]
pub fn bernoulli_word<R: Rng + ?Sized>(rng: &mut R, p: f64) -> u64 {
    if p >= 1.0 {
        return !0;
    }
    if p <= 0.0 {
        return 0;
    }
    // p < 1, so the product is below 2^64 and the cast truncates.
    let digits = (p * 18_446_744_073_709_551_616.0) as u64;
    let mut undecided = !0u64;
    let mut result = 0u64;
    let mut bit = 63;
    loop {
        let rest = if bit == 63 { digits } else { digits & ((1u64 << (bit + 1)) - 1) };
        if rest == 0 || undecided == 0 {
            // Remaining digits of p are zero: an undecided lane has U >= p.
            return result;
        }
        let r: u64 = rng.random();
        if (digits >> bit) & 1 == 1 {
            result |= undecided & !r;
            undecided &= r;
        } else {
            undecided &= !r;
        }
        if bit == 0 {
            return result;
        }
        bit -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(binomial_subset(100, 0.0, &mut rng).is_empty());
        assert_eq!(binomial_subset(100, 1.0, &mut rng), (0..100).collect::<Vec<_>>());
        assert!(binomial_subset(0, 0.5, &mut rng).is_empty());
        assert_eq!(bernoulli_word(&mut rng, 0.0), 0);
        assert_eq!(bernoulli_word(&mut rng, 1.0), !0);
    }

    #[test]
    fn subset_sizes_follow_binomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10_000;
        let trials = 400;
        let mut hits = vec![0u32; n];
        let sizes: Vec<f64> = (0..trials)
            .map(|_| {
                let s = binomial_subset(n, 0.1, &mut rng);
                assert!(s.windows(2).all(|w| w[0] < w[1]));
                for &i in &s {
                    hits[i] += 1;
                }
                s.len() as f64
            })
            .collect();
        let mean = sizes.iter().sum::<f64>() / trials as f64;
        let var = sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        // Exact: mean 1000, sd 30.
        assert!((mean - 1000.0).abs() < 5.0, "mean {mean}");
        assert!((var.sqrt() - 30.0).abs() < 4.0, "sd {}", var.sqrt());
        let freq = hits.iter().map(|&h| h as f64).sum::<f64>() / (n * trials) as f64;
        assert!((freq - 0.1).abs() < 0.01);
    }

    #[test]
    fn bernoulli_word_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &p in &[0.01, 0.3, 0.5, 0.77, 0.999] {
            let words = 20_000;
            let ones: u64 = (0..words)
                .map(|_| bernoulli_word(&mut rng, p).count_ones() as u64)
                .sum();
            let total = (words * 64) as f64;
            let freq = ones as f64 / total;
            let sd = (p * (1.0 - p) / total).sqrt();
            assert!((freq - p).abs() < 5.0 * sd, "p {p}: {freq}");
        }
    }

    #[test]
    fn bernoulli_word_lanes_independent() {
        // Pairwise agreement between two lanes should be p^2 + (1-p)^2.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = 0.3;
        let words = 50_000;
        let both = (0..words)
            .filter(|_| {
                let w = bernoulli_word(&mut rng, p);
                w & 1 == 1 && (w >> 37) & 1 == 1
            })
            .count();
        let freq = both as f64 / words as f64;
        assert!((freq - p * p).abs() < 0.01, "{freq}");
    }
}
