//! Seeded, replication-parallel Monte-Carlo plumbing.
//!
//! Substreams are derived from `(seed, replication index)` with a
//! counter-based generator (ChaCha in stream mode), so replications are
//! independent without jump-ahead bookkeeping and results are identical
//! regardless of scheduling. Summaries reduce pairwise so that permuting
//! replication order cannot change the reported statistics.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::risk::RiskValue;

/// Shared Monte-Carlo knobs: every experiment config embeds one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    /// Master seed; identical seeds give bit-identical reports.
    pub seed: u64,
    /// Number of replications.
    pub reps: usize,
}

impl McConfig {
    pub fn new(seed: u64, reps: usize) -> Result<Self> {
        if reps == 0 {
            return Err(LabError::param(
                "replication count must be >= 1".to_string(),
            ));
        }
        Ok(Self { seed, reps })
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Deterministic, statistically independent substream for one replication.
///
/// The 256-bit ChaCha key is expanded from the seed; the replication index
/// selects the cipher stream, so distinct indices give non-overlapping
/// keystreams of the same key.
pub fn derive_substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = seed ^ 0xA076_1D64_78BD_642F;
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Map `f` over replication indices on independent substreams, in
/// parallel, collecting results in index order.
pub fn run_replications<T, Fn>(cfg: McConfig, f: Fn) -> Vec<T>
where
    T: Send,
    Fn: Sync + Send + core::ops::Fn(usize, &mut ChaCha8Rng) -> T,
{
    (0..cfg.reps)
        .into_par_iter()
        .map(|b| {
            let mut rng = derive_substream(cfg.seed, b as u64);
            f(b, &mut rng)
        })
        .collect()
}

/// Sum by pairwise reduction: error grows like O(log n) and the result is
/// invariant under permutations of equal-length halves, which keeps
/// replication summaries order-independent.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Mean and Monte-Carlo standard error over the finite entries, with the
/// infinite entries counted separately rather than averaged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStat {
    pub mean: f64,
    pub mc_standard_error: f64,
    pub count_infinite: usize,
    pub count: usize,
}

/// Summarize extended-real observations. Infinite losses never enter the
/// mean silently; they are counted and surfaced.
pub fn summarize(values: &[RiskValue<f64>]) -> Result<SummaryStat> {
    if values.is_empty() {
        return Err(LabError::Empty("summary input"));
    }
    let finite: Vec<f64> = values.iter().filter_map(RiskValue::as_finite).collect();
    let count_infinite = values.len() - finite.len();
    if finite.is_empty() {
        return Ok(SummaryStat {
            mean: f64::NAN,
            mc_standard_error: f64::NAN,
            count_infinite,
            count: values.len(),
        });
    }
    let n = finite.len() as f64;
    let mean = pairwise_sum(&finite) / n;
    let mc_standard_error = if finite.len() < 2 {
        0.0
    } else {
        let sq: Vec<f64> = finite.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = pairwise_sum(&sq) / (n - 1.0);
        (var / n).sqrt()
    };
    Ok(SummaryStat {
        mean,
        mc_standard_error,
        count_infinite,
        count: values.len(),
    })
}

/// Plain-`f64` convenience wrapper around [`summarize`].
pub fn summarize_f64(values: &[f64]) -> Result<SummaryStat> {
    let wrapped: Vec<RiskValue<f64>> = values
        .iter()
        .map(|&v| {
            if v.is_infinite() {
                RiskValue::Infinite
            } else {
                RiskValue::Finite(v)
            }
        })
        .collect();
    summarize(&wrapped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn substreams_are_deterministic_and_distinct() {
        let mut a1 = derive_substream(42, 7);
        let mut a2 = derive_substream(42, 7);
        let seq1: Vec<u64> = (0..16).map(|_| a1.gen()).collect();
        let seq2: Vec<u64> = (0..16).map(|_| a2.gen()).collect();
        assert_eq!(seq1, seq2);

        let mut b = derive_substream(42, 0);
        let mut c = derive_substream(42, 1);
        assert_ne!(b.gen::<u64>(), c.gen::<u64>());
        let mut d = derive_substream(43, 0);
        let mut b2 = derive_substream(42, 0);
        assert_ne!(b2.gen::<u64>(), d.gen::<u64>());
    }

    #[test]
    fn substream_uniformity_chi_square() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let mut rng = derive_substream(42, 0);
        const BINS: usize = 100;
        const N: usize = 1_000_000;
        let mut counts = [0usize; BINS];
        for _ in 0..N {
            let u: f64 = rng.gen();
            counts[((u * BINS as f64) as usize).min(BINS - 1)] += 1;
        }
        let expected = N as f64 / BINS as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        let p = 1.0 - ChiSquared::new((BINS - 1) as f64).unwrap().cdf(stat);
        assert!(
            p > 0.001 && p < 0.999,
            "chi-square p-value {p} (stat {stat})"
        );
    }

    #[test]
    fn summarize_examples() {
        let ones = vec![RiskValue::Finite(1.0); 3];
        let s = summarize(&ones).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.mc_standard_error, 0.0);
        assert_eq!(s.count_infinite, 0);

        let with_inf = vec![RiskValue::Finite(1.0), RiskValue::Infinite];
        let s = summarize(&with_inf).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.count_infinite, 1);

        let pair = vec![RiskValue::Finite(0.0), RiskValue::Finite(2.0)];
        let s = summarize(&pair).unwrap();
        assert_abs_diff_eq!(s.mean, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.mc_standard_error, 1.0, epsilon = 1e-15);

        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn pairwise_sum_is_permutation_stable() {
        let mut rng = derive_substream(9, 0);
        let xs: Vec<f64> = (0..1024).map(|_| rng.gen::<f64>() * 1e6).collect();
        let base = summarize_f64(&xs).unwrap();
        let mut perm = xs.clone();
        perm.reverse();
        let rev = summarize_f64(&perm).unwrap();
        assert_abs_diff_eq!(base.mean, rev.mean, epsilon = 1e-12);
        assert_abs_diff_eq!(
            base.mc_standard_error,
            rev.mc_standard_error,
            epsilon = 1e-12
        );
    }

    #[test]
    fn run_replications_ordered_and_deterministic() {
        let cfg = McConfig::new(5, 64).unwrap();
        let a = run_replications(cfg, |b, rng| (b, rng.gen::<u64>()));
        let b = run_replications(cfg, |b, rng| (b, rng.gen::<u64>()));
        assert_eq!(a, b);
        for (i, (idx, _)) in a.iter().enumerate() {
            assert_eq!(i, *idx);
        }
    }
}
