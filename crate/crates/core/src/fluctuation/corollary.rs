use crate::error::{Error, Result};
use crate::increments::IncrementSpec;
use crate::parallel;
use crate::rng::{Purpose, RandomStream};
use crate::stats::{ks_two_sample, KsResult};
use crate::walk::{sample_cycle, CrossingConvention};

/// Two-sample comparison of `Θ_n` given `min_{k<=n} Ψ_k > 0` against free
/// draws of `Θ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryCheck {
    pub n: usize,
    pub ks: KsResult,
    pub accepted: usize,
    pub attempts: u64,
    /// Cycles that hit the cap, in the conditioned and the free samples.
    pub censored_conditioned: u64,
    pub censored_free: u64,
}

impl CorollaryCheck {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.attempts as f64
    }
}

/// `(Θ_n, censored cycles)`, or `None` as soon as a partial sum of the cycle
/// areas is not positive when `conditioned`.
fn draw(spec: &IncrementSpec, n: usize, cap: usize, rng: &mut RandomStream, conditioned: bool) -> Option<(u64, u64)> {
    let mut theta = 0u64;
    let mut psi = 0.0;
    let mut censored = 0;
    for _ in 0..n {
        let c = sample_cycle(spec, rng, cap, CrossingConvention::WeakUp);
        theta += c.theta as u64;
        psi += c.psi;
        censored += u64::from(c.censored);
        if conditioned && psi <= 0.0 {
            return None;
        }
    }
    Some((theta, censored))
}

/// Cycles of a right-exponential walk are i.i.d. under `P(. | S_1 > 0)` and
/// are drawn one after another from a single stream per sample.
pub fn corollary_independence_check(
    spec: &IncrementSpec,
    n: usize,
    samples: usize,
    seed: u64,
    shards: usize,
    cap: usize,
) -> Result<CorollaryCheck> {
    if !spec.is_right_exponential() || spec.is_lattice() {
        return Err(Error::InvalidParameter(format!(
            "the cycle-area law of {} is not continuous with i.i.d. cycles",
            spec.name()
        )));
    }
    if n == 0 || samples == 0 {
        return Err(Error::InvalidParameter("n and samples must be positive".into()));
    }
    let (cond, attempts) = parallel::run_until(samples, shards, (samples as u64).max(1024), |i| {
        draw(spec, n, cap, &mut RandomStream::new(seed, Purpose::COROLLARY_COND, i), true)
    });
    let free = parallel::run_indexed(samples as u64, shards, |i| {
        draw(spec, n, cap, &mut RandomStream::new(seed, Purpose::COROLLARY_FREE, i), false)
            .expect("unconditioned draws are always accepted")
    });
    let xs: Vec<f64> = cond.iter().map(|&(t, _)| t as f64).collect();
    let ys: Vec<f64> = free.iter().map(|&(t, _)| t as f64).collect();
    Ok(CorollaryCheck {
        n,
        ks: ks_two_sample(&xs, &ys),
        accepted: cond.len(),
        attempts,
        censored_conditioned: cond.iter().map(|c| c.1).sum(),
        censored_free: free.iter().map(|c| c.1).sum(),
    })
}
