use super::Estimate;
use crate::increments::IncrementSpec;
use crate::parallel;
use crate::rng::{Purpose, RandomStream};

/// Streams for `p_n` are keyed by `n`, so a grid point reproduces the
/// standalone estimate at the same `n`.
fn persistence_purpose(n: usize) -> Purpose {
    Purpose(Purpose::PERSISTENCE.0 | (n as u64) << 16)
}

fn survives(spec: &IncrementSpec, n: usize, rng: &mut RandomStream) -> bool {
    let (mut s, mut a) = (0.0, 0.0);
    for _ in 0..n {
        s += spec.sample(rng);
        a += s;
        if a <= 0.0 {
            return false;
        }
    }
    true
}

/// Indicator-mean estimate of `p_n = P(A_1 > 0, ..., A_n > 0)`; each path
/// stops at its first non-positive area.
pub fn mc_persistence(spec: &IncrementSpec, n: usize, samples: u64, seed: u64, shards: usize) -> Estimate {
    let purpose = persistence_purpose(n);
    let hits = parallel::run_indexed(samples, shards, |i| survives(spec, n, &mut RandomStream::new(seed, purpose, i)));
    Estimate::from_indicator(hits.iter().filter(|&&h| h).count() as u64, samples)
}

pub fn mc_persistence_grid(
    spec: &IncrementSpec,
    grid: &[usize],
    samples: u64,
    seed: u64,
    shards: usize,
) -> Vec<(u64, Estimate)> {
    grid.iter().map(|&n| (n as u64, mc_persistence(spec, n, samples, seed, shards))).collect()
}

/// Estimate of `P(S_n > 0)`.
pub fn positivity_limit_check(spec: &IncrementSpec, n: usize, samples: u64, seed: u64, shards: usize) -> Estimate {
    let hits = parallel::run_indexed(samples, shards, |i| {
        let mut rng = RandomStream::new(seed, Purpose::POSITIVITY, i);
        (0..n).map(|_| spec.sample(&mut rng)).sum::<f64>() > 0.0
    });
    Estimate::from_indicator(hits.iter().filter(|&&h| h).count() as u64, samples)
}
