use rand::{Rng, RngCore};
use rand_distr::Exp1;

use super::{zeta, Family, HeavyTail, NegativePart};
use crate::rational;
use crate::rng::RandomStream;

/// Size of the inverse-CDF table for heavy-tailed jumps.
const HEAVY_TABLE: usize = 4096;

#[derive(Debug, Clone)]
pub(super) enum Sampler {
    Sign,
    Lazy { stay: f64 },
    RightContinuous(RightContinuous),
    Exponential { pos_prob: f64, rate: f64, neg: NegativePart },
    Heavy(HeavySampler),
}

#[derive(Debug, Clone)]
pub(super) struct RightContinuous {
    up: f64,
    head: Vec<f64>,
    tail_start: u64,
    tail_mass: f64,
    ln_ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub(super) struct HeavySampler {
    law: HeavyTail,
    /// `table[i] = P(K >= k0 + i | S_1 < 0)`, decreasing from 1.
    table: Vec<f64>,
}

impl Sampler {
    pub(super) fn build(family: &Family, heavy: Option<&HeavyTail>) -> Self {
        match family {
            Family::SimpleWalk => Sampler::Sign,
            Family::LazySimpleWalk { stay } => Sampler::Lazy { stay: rational::to_f64(stay) },
            Family::RightContinuousLattice { up, neg } => {
                let (tail_mass, ln_ratio) = match &neg.tail {
                    Some(t) => {
                        let r = rational::to_f64(&t.ratio);
                        let mass = rational::to_f64(&t.first) / (1.0 - r);
                        (mass, (r > 0.0).then(|| r.ln()))
                    }
                    None => (0.0, None),
                };
                Sampler::RightContinuous(RightContinuous {
                    up: rational::to_f64(up),
                    head: neg.head.iter().map(rational::to_f64).collect(),
                    tail_start: neg.head.len() as u64,
                    tail_mass,
                    ln_ratio,
                })
            }
            Family::RightExponential { pos_prob, rate, neg } => {
                Sampler::Exponential { pos_prob: *pos_prob, rate: *rate, neg: *neg }
            }
            Family::HeavyTailRightContinuous { .. } => {
                let law = *heavy.expect("heavy-tail constants are solved before sampling");
                let mut table = Vec::with_capacity(HEAVY_TABLE);
                // Accumulate from the far end so each entry carries the exact tail.
                let far = law.k0 + HEAVY_TABLE as u64;
                let mut acc = zeta::hurwitz(law.alpha + 1.0, far as f64);
                let mut rev = Vec::with_capacity(HEAVY_TABLE);
                for k in (law.k0..far).rev() {
                    acc += (k as f64).powf(-law.alpha - 1.0);
                    rev.push(acc / law.z_neg);
                }
                table.extend(rev.into_iter().rev());
                Sampler::Heavy(HeavySampler { law, table })
            }
        }
    }

    #[inline]
    pub(super) fn sample(&self, rng: &mut RandomStream) -> f64 {
        match self {
            Sampler::Sign => {
                if rng.next_u64() >> 63 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            Sampler::Lazy { stay } => {
                let u = rng.uniform();
                if u < *stay {
                    0.0
                } else if u < stay + (1.0 - stay) / 2.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Sampler::RightContinuous(rc) => rc.sample(rng),
            Sampler::Exponential { pos_prob, rate, neg } => {
                if rng.uniform() < *pos_prob {
                    rng.sample::<f64, _>(Exp1) / rate
                } else {
                    match *neg {
                        NegativePart::Exponential { rate } => -rng.sample::<f64, _>(Exp1) / rate,
                        NegativePart::Uniform { width } => -width * rng.uniform(),
                    }
                }
            }
            Sampler::Heavy(h) => {
                if rng.uniform() < h.law.up {
                    1.0
                } else {
                    -(h.negative_magnitude(rng.uniform_open0()) as f64)
                }
            }
        }
    }

    #[inline]
    pub(super) fn sample_positive(&self, rng: &mut RandomStream) -> f64 {
        match self {
            Sampler::Exponential { rate, .. } => rng.sample::<f64, _>(Exp1) / rate,
            _ => 1.0,
        }
    }
}

impl RightContinuous {
    #[inline]
    fn sample(&self, rng: &mut RandomStream) -> f64 {
        let u = rng.uniform();
        if u < self.up {
            return 1.0;
        }
        let mut v = u - self.up;
        let mut last = 0;
        for (k, &m) in self.head.iter().enumerate() {
            if m > 0.0 {
                if v < m {
                    return -(k as f64);
                }
                last = k;
            }
            v -= m;
        }
        if self.tail_mass <= 0.0 {
            // only reachable through rounding in the head sums
            return -(last as f64);
        }
        let w = (v / self.tail_mass).clamp(0.0, 1.0 - f64::EPSILON);
        let i = match self.ln_ratio {
            Some(lr) => ((1.0 - w).ln() / lr).floor() as u64,
            None => 0,
        };
        -((self.tail_start + i) as f64)
    }
}

impl HeavySampler {
    fn tail(&self, k: u64) -> f64 {
        zeta::hurwitz(self.law.alpha + 1.0, k as f64) / self.law.z_neg
    }

    /// Largest `k >= k0` with `P(K >= k) >= v`, for `v ∈ (0, 1]`.
    fn negative_magnitude(&self, v: f64) -> u64 {
        let t = &self.table;
        if v > t[t.len() - 1] {
            // table is decreasing: count entries >= v
            let idx = t.partition_point(|&g| g >= v);
            return self.law.k0 + idx as u64 - 1;
        }
        // P(K >= k) ≈ (k - 1/2)^(-alpha) / (alpha ζ(alpha+1, k0)) far in the tail
        let a = self.law.alpha;
        let guess = 0.5 + (a * v * self.law.z_neg).powf(-1.0 / a);
        let floor = self.law.k0 + t.len() as u64 - 1;
        let mut k = (guess.floor() as u64).max(floor);
        while self.tail(k + 1) >= v {
            k += 1;
        }
        while k > floor && self.tail(k) < v {
            k -= 1;
        }
        k
    }
}
