use super::fit::{fit_exponent, ExponentFit};
use super::{Estimate, ReferenceConstants};
use crate::error::{Error, Result};
use crate::increments::IncrementSpec;
use crate::parallel;
use crate::rng::{Purpose, RandomStream};
use crate::stats::{half_normal_cdf, ks_one_sample, ks_two_sample, KsResult};
use crate::walk::{first_step, sample_cycle, CrossingConvention, CrossingTracker, Start};

pub const DEFAULT_CYCLE_CAP: usize = 1 << 16;

fn require_right_exponential(spec: &IncrementSpec) -> Result<()> {
    if spec.is_right_exponential() && !spec.is_lattice() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{} is not a right-exponential law", spec.name())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailPoint {
    pub n: u64,
    /// `P(θ_1 >= n)`, counting censored cycles as long.
    pub tail: Estimate,
    /// `n^(1 - 1/alpha) P(θ_1 >= n)`.
    pub rescaled: Estimate,
    /// Rescaled bounds for the censored mass; a single point unless `n`
    /// exceeds the simulated horizon.
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleTail {
    pub points: Vec<TailPoint>,
    /// Cycles still open at the simulated horizon `min(cap, max n)`.
    pub censored: u64,
    pub horizon: usize,
    /// Log-log slope of the tail, when the grid has at least 4 points.
    pub slope: Option<ExponentFit>,
}

/// Tail of the first cycle length under `P(. | S_1 > 0)`. Cycles are run up
/// to `min(cap, max n_grid)`.
pub fn mc_cycle_tail(
    spec: &IncrementSpec,
    n_grid: &[usize],
    samples: u64,
    cap: usize,
    seed: u64,
    shards: usize,
) -> Result<CycleTail> {
    let top = *n_grid.iter().max().ok_or_else(|| Error::DegenerateGrid("empty grid".into()))?;
    if n_grid.contains(&0) {
        return Err(Error::DegenerateGrid("cycle lengths start at 1".into()));
    }
    let horizon = cap.min(top).max(1);
    let draws = parallel::run_indexed(samples, shards, |i| {
        let c =
            sample_cycle(spec, &mut RandomStream::new(seed, Purpose::CYCLE, i), horizon, CrossingConvention::WeakUp);
        (c.theta, c.censored)
    });
    let censored = draws.iter().filter(|d| d.1).count() as u64;
    let power = 1.0 - 1.0 / spec.alpha();
    let points: Vec<TailPoint> = n_grid
        .iter()
        .map(|&n| {
            let known = draws.iter().filter(|&&(t, c)| !c && t >= n).count() as u64;
            let long = if n <= horizon { censored } else { 0 };
            let tail = Estimate::from_indicator(known + long, samples);
            let scale = (n as f64).powf(power);
            let interval = if n <= horizon {
                (tail.value * scale, tail.value * scale)
            } else {
                (known as f64 / samples as f64 * scale, (known + censored) as f64 / samples as f64 * scale)
            };
            let tail = if n <= horizon { tail } else { Estimate::from_indicator(known + censored, samples) };
            TailPoint { n: n as u64, rescaled: tail.scaled(scale), tail, interval }
        })
        .collect();
    let pairs: Vec<(u64, Estimate)> = points.iter().map(|p| (p.n, p.tail)).collect();
    let slope = fit_exponent(&pairs).ok();
    Ok(CycleTail { points, censored, horizon, slope })
}

/// `η(n)`: number of weak up-crossings in `1..=n` of a walk started with
/// `S_1 > 0`.
fn eta(spec: &IncrementSpec, n: usize, rng: &mut RandomStream) -> usize {
    let mut tracker = CrossingTracker::new(CrossingConvention::WeakUp);
    tracker.push(first_step(spec, rng, Start::Positive));
    (0..n).filter(|_| tracker.push(spec.sample(rng)).is_some()).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaScaling {
    pub n: usize,
    /// `(η(n) + U) / n^(1 - 1/alpha)` with `U` uniform on `[0, 1)`.
    pub scaled: Vec<f64>,
    /// Scale of the half-normal limit, `sqrt(2/π) / c2`.
    pub reference_scale: Option<f64>,
    pub ks: Option<KsResult>,
}

impl EtaScaling {
    pub fn reference(&self) -> Result<&KsResult> {
        self.ks.as_ref().ok_or_else(|| {
            Error::NoReferenceLaw(
                "a half-normal limit is only available for right-exponential laws with alpha = 2".into(),
            )
        })
    }
}

pub fn mc_eta_scaling(spec: &IncrementSpec, n: usize, samples: u64, seed: u64, shards: usize) -> EtaScaling {
    let norm = (n as f64).powf(1.0 - 1.0 / spec.alpha());
    let scaled = parallel::run_indexed(samples, shards, |i| {
        let e = eta(spec, n, &mut RandomStream::new(seed, Purpose::ETA, i));
        (e as f64 + RandomStream::new(seed, Purpose::JITTER, i).uniform()) / norm
    });
    let reference_scale = match ReferenceConstants::for_spec(spec).c2 {
        Some(c2) if spec.alpha() == 2.0 => Some((2.0 / std::f64::consts::PI).sqrt() / c2),
        _ => None,
    };
    let ks = reference_scale.map(|s| ks_one_sample(&scaled, |x| half_normal_cdf(x, s)));
    EtaScaling { n, scaled, reference_scale, ks }
}

/// Number of leading positive partial sums of the cycle areas, at most `n_max`.
fn positive_run(spec: &IncrementSpec, n_max: usize, cap: usize, rng: &mut RandomStream) -> usize {
    let mut psi = 0.0;
    for k in 0..n_max {
        psi += sample_cycle(spec, rng, cap, CrossingConvention::WeakUp).psi;
        if psi <= 0.0 {
            return k;
        }
    }
    n_max
}

/// `P(min_{k<=n} Ψ_k > 0 | S_1 > 0)` for `n = 0..=n_max`, from i.i.d. cycles.
pub fn cycle_minimum_probability(
    spec: &IncrementSpec,
    n_max: usize,
    samples: u64,
    seed: u64,
    shards: usize,
    cap: usize,
) -> Result<Vec<Estimate>> {
    require_right_exponential(spec)?;
    let runs = parallel::run_indexed(samples, shards, |i| {
        positive_run(spec, n_max, cap, &mut RandomStream::new(seed, Purpose::KEY_CYCLES, i))
    });
    Ok((0..=n_max)
        .map(|n| Estimate::from_indicator(runs.iter().filter(|&&k| k >= n).count() as u64, samples))
        .collect())
}

/// Whether every cycle completed by time `n` has a positive area, and the
/// same with one more cycle (run past `n` for at most `cap` steps).
fn cycle_areas_positive(spec: &IncrementSpec, n: usize, cap: usize, rng: &mut RandomStream) -> (bool, bool) {
    let mut tracker = CrossingTracker::new(CrossingConvention::WeakUp);
    tracker.push(first_step(spec, rng, Start::Positive));
    for _ in 0..n {
        if let Some(c) = tracker.push(spec.sample(rng)) {
            if c.area <= 0.0 {
                return (false, false);
            }
        }
    }
    for _ in 0..cap {
        if let Some(c) = tracker.push(spec.sample(rng)) {
            return (true, c.area > 0.0);
        }
    }
    (true, tracker.a() > 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyIdentity {
    pub n: usize,
    /// `P(min_{k<=η(n)} Ψ_k > 0 | S_1 > 0)`, estimated directly.
    pub lhs: Estimate,
    /// `sum_j P(η(n) = j) P(min_{k<=j} Ψ_k > 0)` from two independent runs.
    pub rhs: Estimate,
    /// The right side with the cycle-minimum factors replaced by `C(2j, j) / 4^j`.
    pub rhs_closed_form: Estimate,
    pub z_score: f64,
}

pub fn check_key_identity(
    spec: &IncrementSpec,
    n: usize,
    samples: u64,
    seed: u64,
    shards: usize,
    cap: usize,
) -> Result<KeyIdentity> {
    require_right_exponential(spec)?;
    let hits = parallel::run_indexed(samples, shards, |i| {
        cycle_areas_positive(spec, n, 0, &mut RandomStream::new(seed, Purpose::KEY_LHS, i)).0
    });
    let lhs = Estimate::from_indicator(hits.iter().filter(|&&h| h).count() as u64, samples);

    let etas =
        parallel::run_indexed(samples, shards, |i| eta(spec, n, &mut RandomStream::new(seed, Purpose::KEY_ETA, i)));
    let top = etas.iter().copied().max().unwrap_or(0);
    let mut hist = vec![0u64; top + 1];
    for &e in &etas {
        hist[e] += 1;
    }
    let runs = parallel::run_indexed(samples, shards, |i| {
        positive_run(spec, top, cap, &mut RandomStream::new(seed, Purpose::KEY_CYCLES, i))
    });
    let m = samples as f64;
    let w: Vec<f64> = hist.iter().map(|&h| h as f64 / m).collect();
    let f: Vec<f64> = (0..=top).map(|j| runs.iter().filter(|&&k| k >= j).count() as f64 / m).collect();
    let rhs_value: f64 = w.iter().zip(&f).map(|(a, b)| a * b).sum();
    // variance of the η part with f fixed plus the cycle part with w fixed;
    // the cycle part is the mean of W(K) = sum_{j<=K} w_j
    let var_eta = etas.iter().map(|&e| (f[e] - rhs_value).powi(2)).sum::<f64>() / m / m;
    let cum: Vec<f64> = w
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let wk: Vec<f64> = runs.iter().map(|&k| cum[k.min(top)]).collect();
    let var_cycles = crate::stats::variance(&wk) / m;
    let rhs = Estimate::new(rhs_value, (var_eta + var_cycles).sqrt(), 2 * samples);

    let closed: Vec<f64> = (0..=top)
        .map(|j| crate::rational::to_f64(&crate::rational::central_binomial_over_four_pow(j as u64)))
        .collect();
    let closed_value: f64 = w.iter().zip(&closed).map(|(a, b)| a * b).sum();
    let var_closed = etas.iter().map(|&e| (closed[e] - closed_value).powi(2)).sum::<f64>() / m / m;
    let rhs_closed_form = Estimate::new(closed_value, var_closed.sqrt(), samples);

    let se = (lhs.stderr.powi(2) + rhs.stderr.powi(2)).sqrt();
    let diff = lhs.value - rhs.value;
    let z_score = if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    Ok(KeyIdentity { n, lhs, rhs, rhs_closed_form, z_score })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SandwichForm {
    /// Cycles completed by time `n`.
    Eta,
    /// One more cycle than that.
    EtaPlusOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichCheck {
    pub n: usize,
    /// `p_n / P(S_1 > 0)`.
    pub ratio: Estimate,
    /// `P(min_{k<=η(n)} Ψ_k > 0 | S_1 > 0)`.
    pub eta: Estimate,
    /// `P(min_{k<=η(n)+1} Ψ_k > 0 | S_1 > 0)`.
    pub eta_plus_one: Estimate,
}

impl SandwichCheck {
    /// `ratio` lies in `[m/2, m]` up to `k` standard errors, with `m` the
    /// cycle-minimum probability of the given form.
    pub fn holds(&self, form: SandwichForm, k: f64) -> bool {
        let m = match form {
            SandwichForm::Eta => &self.eta,
            SandwichForm::EtaPlusOne => &self.eta_plus_one,
        };
        let lo = m.value / 2.0 - k * (self.ratio.stderr + m.stderr / 2.0);
        let hi = m.value + k * (self.ratio.stderr + m.stderr);
        (lo..=hi).contains(&self.ratio.value)
    }
}

pub fn sandwich_check(
    spec: &IncrementSpec,
    n: usize,
    samples: u64,
    seed: u64,
    shards: usize,
    cap: usize,
) -> SandwichCheck {
    let p = super::mc_persistence(spec, n, samples, seed, shards);
    let ratio = p.scaled(1.0 / spec.moments().pos_prob);
    let pairs = parallel::run_indexed(samples, shards, |i| {
        cycle_areas_positive(spec, n, cap, &mut RandomStream::new(seed, Purpose::SANDWICH, i))
    });
    let eta = Estimate::from_indicator(pairs.iter().filter(|p| p.0).count() as u64, samples);
    let eta_plus_one = Estimate::from_indicator(pairs.iter().filter(|p| p.1).count() as u64, samples);
    SandwichCheck { n, ratio, eta, eta_plus_one }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiSymmetry {
    pub ks: KsResult,
    /// Censored cycles, left out of both samples.
    pub censored: u64,
}

/// Two-sample KS test of `ψ_1` against `-ψ_1` drawn from an independent stream.
pub fn psi_symmetry_check(
    spec: &IncrementSpec,
    samples: u64,
    seed: u64,
    shards: usize,
    cap: usize,
) -> Result<PsiSymmetry> {
    require_right_exponential(spec)?;
    let draw = |purpose: Purpose, i: u64| {
        let c = sample_cycle(spec, &mut RandomStream::new(seed, purpose, i), cap, CrossingConvention::WeakUp);
        (!c.censored).then_some(c.psi)
    };
    let a = parallel::run_indexed(samples, shards, |i| draw(Purpose::SYMMETRY_A, i));
    let b = parallel::run_indexed(samples, shards, |i| draw(Purpose::SYMMETRY_B, i));
    let censored = a.iter().chain(&b).filter(|x| x.is_none()).count() as u64;
    let xs: Vec<f64> = a.into_iter().flatten().collect();
    let ys: Vec<f64> = b.into_iter().flatten().map(|x| -x).collect();
    Ok(PsiSymmetry { ks: ks_two_sample(&xs, &ys), censored })
}
