//! Monte Carlo estimation of persistence probabilities, cycle tails and
//! renewal counts, with power-law fits and the cycle identities that link
//! them.

mod cycles;
mod fit;
mod persistence;
mod report;

use std::fmt;

use crate::increments::IncrementSpec;

pub use cycles::{
    check_key_identity, cycle_minimum_probability, mc_cycle_tail, mc_eta_scaling, psi_symmetry_check, sandwich_check,
    CycleTail, EtaScaling, KeyIdentity, PsiSymmetry, SandwichCheck, SandwichForm, TailPoint, DEFAULT_CYCLE_CAP,
};
pub use fit::{estimate_constant, fit_exponent, persistence_exponent, ExponentFit, FIT_HEADER};
pub use persistence::{mc_persistence, mc_persistence_grid, positivity_limit_check};
pub use report::{scaling_report, ScalingReport};

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub ci95: (f64, f64),
}

impl Estimate {
    pub fn new(value: f64, stderr: f64, n_samples: u64) -> Self {
        Self { value, stderr, n_samples, ci95: (value - 1.96 * stderr, value + 1.96 * stderr) }
    }

    /// Exact value, no sampling error.
    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0, 0)
    }

    /// Mean of `hits` indicators out of `n`.
    pub fn from_indicator(hits: u64, n: u64) -> Self {
        let v = hits as f64 / n as f64;
        Self::new(v, (v * (1.0 - v) / n as f64).sqrt(), n)
    }

    /// Sample mean with the standard error of the mean.
    pub fn from_values(xs: &[f64]) -> Self {
        let n = xs.len();
        let m = crate::stats::mean(xs);
        let se = if n > 1 { (crate::stats::variance(xs) / n as f64).sqrt() } else { 0.0 };
        Self::new(m, se, n as u64)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.value * factor, self.stderr * factor.abs(), self.n_samples)
    }

    /// `|value - target| <= k stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} ± {:.6} (n = {})", self.value, self.stderr, self.n_samples)
    }
}

/// Closed-form constants used as references for the estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConstants {
    /// Limit of `n^(1/2) C(2n, n) / 4^n`.
    pub c1: f64,
    /// Limit of `n^(1/2) P(θ_1 >= n)` for right-exponential laws with finite variance.
    pub c2: Option<f64>,
    /// Bounds on the persistence constant for finite variance.
    pub eqc_interval: Option<(f64, f64)>,
}

impl ReferenceConstants {
    pub fn for_spec(spec: &IncrementSpec) -> Self {
        let c1 = 1.0 / std::f64::consts::PI.sqrt();
        let m = spec.moments();
        let Some(var) = m.variance else {
            return Self { c1, c2: None, eqc_interval: None };
        };
        let sigma = var.sqrt();
        let c2 = spec.is_right_exponential().then(|| (8.0 / std::f64::consts::PI).sqrt() * sigma / m.e_abs);
        let hi = 2f64.powf(0.25) / std::f64::consts::PI * libm::tgamma(0.25) * (sigma / m.e_abs).sqrt() * m.pos_prob;
        Self { c1, c2, eqc_interval: Some((hi / 2.0, hi)) }
    }
}

pub const ESTIMATE_HEADER: &str = "spec_id,quantity,n,value,stderr,n_samples,seed,shards";

pub fn estimate_csv_row(spec_id: &str, quantity: &str, n: u64, e: &Estimate, seed: u64, shards: usize) -> String {
    format!("{spec_id},{quantity},{n},{},{},{},{seed},{shards}", e.value, e.stderr, e.n_samples)
}
