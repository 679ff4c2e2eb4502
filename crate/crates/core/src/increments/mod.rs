//! Increment laws of the walk.
//!
//! Every family here is either right-continuous (the only positive step is
//! `+1`) or right-exponential (`S_1 | S_1 > 0` is exponential). Lattice
//! families with rational masses are handled in exact arithmetic; the
//! heavy-tailed family has irrational masses `c k^(-alpha-1)` and is exact
//! only up to `f64` rounding.

mod config;
mod sampler;
pub mod zeta;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, int, ratio, Rational};
use crate::rng::RandomStream;

pub use config::SPEC_KEYS;
use sampler::Sampler;

/// Geometric continuation of a negative lattice law:
/// `P(S_1 = -(start + i)) = first * ratio^i`, `start` = length of the head.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricTail {
    pub first: Rational,
    pub ratio: Rational,
}

/// Law of the non-positive part of a right-continuous lattice increment:
/// `head[k] = P(S_1 = -k)` followed by an optional geometric tail.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeLattice {
    pub head: Vec<Rational>,
    pub tail: Option<GeometricTail>,
}

impl NegativeLattice {
    pub fn finite(head: Vec<Rational>) -> Self {
        Self { head, tail: None }
    }

    fn tail_start(&self) -> u64 {
        self.head.len() as u64
    }

    /// `P(S_1 = -k)`.
    pub fn mass_at(&self, k: u64) -> Rational {
        if let Some(m) = self.head.get(k as usize) {
            return m.clone();
        }
        match &self.tail {
            Some(t) => {
                let i = k - self.tail_start();
                &t.first * rational::pow(&t.ratio, i as u32)
            }
            None => Rational::zero(),
        }
    }

    /// `P(S_1 <= -k)` restricted to the negative law, i.e. `Σ_{j≥k} P(S_1 = -j)`.
    pub fn mass_at_least(&self, k: u64) -> Rational {
        let start = self.tail_start();
        let mut total = Rational::zero();
        if k < start {
            for m in &self.head[k as usize..] {
                total += m;
            }
        }
        if let Some(t) = &self.tail {
            let skip = k.saturating_sub(start);
            total += &t.first * rational::pow(&t.ratio, skip as u32) / (Rational::one() - &t.ratio);
        }
        total
    }

    fn moments(&self) -> [Rational; 3] {
        let mut m = [Rational::zero(), Rational::zero(), Rational::zero()];
        for (k, p) in self.head.iter().enumerate() {
            let k = int(k as i64);
            m[0] += p;
            m[1] += p * &k;
            m[2] += p * &k * &k;
        }
        if let Some(t) = &self.tail {
            let s = int(self.tail_start() as i64);
            let one = Rational::one();
            let q = &one - &t.ratio;
            let r = &t.ratio;
            m[0] += &t.first / &q;
            m[1] += &t.first * (&s / &q + r / (&q * &q));
            m[2] += &t.first * (&s * &s / &q + int(2) * &s * r / (&q * &q) + r * (&one + r) / (&q * &q * &q));
        }
        m
    }

    fn support_points(&self) -> (Vec<i64>, bool) {
        let mut pts: Vec<i64> =
            self.head.iter().enumerate().filter(|(_, p)| p.is_positive()).map(|(k, _)| -(k as i64)).collect();
        let mut run = false;
        if let Some(t) = &self.tail {
            if t.first.is_positive() {
                pts.push(-(self.tail_start() as i64));
                if t.ratio.is_positive() {
                    run = true;
                    pts.push(-(self.tail_start() as i64) - 1);
                }
            }
        }
        (pts, run)
    }
}

/// Law of `-S_1` given `S_1 <= 0` for right-exponential increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NegativePart {
    /// `-S_1 | S_1 <= 0 ~ Exp(rate)`.
    Exponential { rate: f64 },
    /// `-S_1 | S_1 <= 0 ~ Uniform[0, width]`.
    Uniform { width: f64 },
}

impl NegativePart {
    fn mean(&self) -> f64 {
        match *self {
            NegativePart::Exponential { rate } => 1.0 / rate,
            NegativePart::Uniform { width } => width / 2.0,
        }
    }

    fn second_moment(&self) -> f64 {
        match *self {
            NegativePart::Exponential { rate } => 2.0 / (rate * rate),
            NegativePart::Uniform { width } => width * width / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `P(±1) = 1/2`.
    SimpleWalk,
    /// `P(0) = stay`, `P(±1) = (1 - stay) / 2`.
    LazySimpleWalk { stay: Rational },
    /// `P(1) = up`, non-positive part given by `neg`.
    RightContinuousLattice { up: Rational, neg: NegativeLattice },
    /// `P(S_1 > 0) = pos_prob`, `S_1 | S_1 > 0 ~ Exp(rate)`.
    RightExponential { pos_prob: f64, rate: f64, neg: NegativePart },
    /// `P(1) = p`, `P(-k) = c k^(-alpha-1)` for `k >= k0`; `p` and `c` are
    /// solved from unit mass and zero mean.
    HeavyTailRightContinuous { alpha: f64, k0: u64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::SimpleWalk => "simple",
            Family::LazySimpleWalk { .. } => "lazy",
            Family::RightContinuousLattice { .. } => "right-continuous",
            Family::RightExponential { .. } => "right-exponential",
            Family::HeavyTailRightContinuous { .. } => "heavy-tail",
        }
    }
}

/// Span `d`, sub-span `h` and shift `a`: `S_1 ∈ d (a + h Z)` almost surely,
/// with `d` and `h` maximal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeInfo {
    pub span: u64,
    pub subspan: u64,
    pub shift: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: Option<f64>,
    pub e_abs: f64,
    pub pos_prob: f64,
}

/// Moments of a rational lattice law, in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMoments {
    pub mean: Rational,
    pub variance: Rational,
    pub e_abs: Rational,
    pub pos_prob: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub family: &'static str,
    /// Total mass and mean, exact (`num/den`) for rational families.
    pub total_mass: String,
    pub mean: String,
    pub right_continuous: bool,
    pub right_exponential: bool,
    pub lattice: Option<LatticeInfo>,
    pub alpha: f64,
}

/// Solved constants of the heavy-tailed family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct HeavyTail {
    pub alpha: f64,
    pub k0: u64,
    pub up: f64,
    pub c: f64,
    /// `ζ(alpha + 1, k0)`, the unnormalized negative mass.
    pub z_neg: f64,
}

impl HeavyTail {
    fn solve(alpha: f64, k0: u64) -> Self {
        let z_mean = zeta::hurwitz(alpha, k0 as f64);
        let z_neg = zeta::hurwitz(alpha + 1.0, k0 as f64);
        let c = 1.0 / (z_mean + z_neg);
        Self { alpha, k0, up: c * z_mean, c, z_neg }
    }

    pub fn mass_neg(&self, k: u64) -> f64 {
        if k < self.k0 {
            0.0
        } else {
            self.c * (k as f64).powf(-self.alpha - 1.0)
        }
    }

    /// `P(S_1 <= -k)`.
    pub fn mass_at_least(&self, k: u64) -> f64 {
        if k <= self.k0 {
            self.c * self.z_neg
        } else {
            self.c * zeta::hurwitz(self.alpha + 1.0, k as f64)
        }
    }
}

/// A validated increment law, immutable and shareable across workers.
#[derive(Debug, Clone)]
pub struct IncrementSpec {
    family: Family,
    report: ValidationReport,
    moments: Moments,
    exact: Option<ExactMoments>,
    heavy: Option<HeavyTail>,
    sampler: Sampler,
}

impl PartialEq for IncrementSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
    }
}

impl IncrementSpec {
    pub fn new(family: Family) -> Result<Self> {
        let report = validate(&family)?;
        let heavy = match family {
            Family::HeavyTailRightContinuous { alpha, k0 } => Some(HeavyTail::solve(alpha, k0)),
            _ => None,
        };
        let exact = exact_moments(&family);
        let moments = match (&family, &exact, &heavy) {
            (_, Some(e), _) => Moments {
                mean: rational::to_f64(&e.mean),
                variance: Some(rational::to_f64(&e.variance)),
                e_abs: rational::to_f64(&e.e_abs),
                pos_prob: rational::to_f64(&e.pos_prob),
            },
            (Family::RightExponential { pos_prob, rate, neg }, _, _) => Moments {
                mean: pos_prob / rate - (1.0 - pos_prob) * neg.mean(),
                variance: Some(pos_prob * 2.0 / (rate * rate) + (1.0 - pos_prob) * neg.second_moment()),
                e_abs: pos_prob / rate + (1.0 - pos_prob) * neg.mean(),
                pos_prob: *pos_prob,
            },
            (_, _, Some(h)) => Moments { mean: 0.0, variance: None, e_abs: 2.0 * h.up, pos_prob: h.up },
            _ => unreachable!("every family has moments"),
        };
        let sampler = Sampler::build(&family, heavy.as_ref());
        Ok(Self { family, report, moments, exact, heavy, sampler })
    }

    pub fn simple() -> Self {
        Self::new(Family::SimpleWalk).expect("simple walk is valid")
    }

    pub fn lazy(stay: Rational) -> Result<Self> {
        Self::new(Family::LazySimpleWalk { stay })
    }

    /// `P(1) = 2/3`, `P(-k) = (1/3) 2^(-k)` for `k >= 1`.
    pub fn geometric_right_continuous() -> Self {
        Self::new(Family::RightContinuousLattice {
            up: ratio(2, 3),
            neg: NegativeLattice {
                head: vec![Rational::zero()],
                tail: Some(GeometricTail { first: ratio(1, 6), ratio: ratio(1, 2) }),
            },
        })
        .expect("geometric right-continuous law is centered")
    }

    /// Laplace law with rate `a`: `S_1 = ±Exp(a)` with equal probabilities.
    pub fn laplace(rate: f64) -> Result<Self> {
        Self::new(Family::RightExponential { pos_prob: 0.5, rate, neg: NegativePart::Exponential { rate } })
    }

    pub fn heavy_tail(alpha: f64, k0: u64) -> Result<Self> {
        Self::new(Family::HeavyTailRightContinuous { alpha, k0 })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    /// Stability index: 2 for finite variance, `alpha` for the heavy tail.
    pub fn alpha(&self) -> f64 {
        self.report.alpha
    }

    pub fn lattice(&self) -> Option<LatticeInfo> {
        self.report.lattice
    }

    pub fn is_lattice(&self) -> bool {
        !matches!(self.family, Family::RightExponential { .. })
    }

    pub fn is_rational(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_right_exponential(&self) -> bool {
        self.report.right_exponential
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    pub fn exact_moments(&self) -> Result<&ExactMoments> {
        match &self.exact {
            Some(e) => Ok(e),
            None if self.is_lattice() => Err(Error::NotRational(self.name())),
            None => Err(Error::NotLattice(self.name())),
        }
    }

    pub fn sigma(&self) -> Result<f64> {
        self.moments.variance.map(f64::sqrt).ok_or(Error::VarianceUndefined { alpha: self.alpha() })
    }

    /// Largest value of the support (1 for every lattice family here).
    pub fn max_jump(&self) -> Result<i64> {
        if self.is_lattice() {
            Ok(1)
        } else {
            Err(Error::NotLattice(self.name()))
        }
    }

    /// Smallest value of the support, `None` when unbounded below.
    pub fn min_jump(&self) -> Result<Option<i64>> {
        match &self.family {
            Family::SimpleWalk => Ok(Some(-1)),
            Family::LazySimpleWalk { stay } => Ok(Some(if stay.is_one() { 0 } else { -1 })),
            Family::RightContinuousLattice { neg, .. } => Ok(match &neg.tail {
                Some(t) if t.first.is_positive() => None,
                _ => {
                    let last = neg.head.iter().rposition(|p| p.is_positive());
                    Some(last.map_or(1, |k| -(k as i64)))
                }
            }),
            Family::HeavyTailRightContinuous { .. } => Ok(None),
            Family::RightExponential { .. } => Err(Error::NotLattice(self.name())),
        }
    }

    /// Number of support points, `None` when infinite.
    pub fn support_size(&self) -> Result<Option<u64>> {
        let lo = self.min_jump()?;
        Ok(lo.map(|lo| ((lo..=1).filter(|&k| self.pmf_f64(k).is_ok_and(|p| p > 0.0)).count()) as u64))
    }

    /// Exact `P(S_1 = k)`.
    pub fn pmf(&self, k: i64) -> Result<Rational> {
        match &self.family {
            Family::SimpleWalk => Ok(if k.abs() == 1 { ratio(1, 2) } else { Rational::zero() }),
            Family::LazySimpleWalk { stay } => Ok(match k {
                0 => stay.clone(),
                1 | -1 => (Rational::one() - stay) / int(2),
                _ => Rational::zero(),
            }),
            Family::RightContinuousLattice { up, neg } => Ok(match k {
                1 => up.clone(),
                k if k <= 0 => neg.mass_at(k.unsigned_abs()),
                _ => Rational::zero(),
            }),
            Family::HeavyTailRightContinuous { .. } => Err(Error::NotRational(self.name())),
            Family::RightExponential { .. } => Err(Error::NotLattice(self.name())),
        }
    }

    pub fn pmf_f64(&self, k: i64) -> Result<f64> {
        if let Some(h) = &self.heavy {
            return Ok(match k {
                1 => h.up,
                k if k < 0 => h.mass_neg(k.unsigned_abs()),
                _ => 0.0,
            });
        }
        self.pmf(k).map(|p| rational::to_f64(&p))
    }

    /// Exact `P(S_1 <= t)`.
    pub fn mass_at_most(&self, t: i64) -> Result<Rational> {
        match &self.family {
            Family::RightContinuousLattice { up, neg } => Ok(if t >= 1 {
                Rational::one()
            } else if t == 0 {
                Rational::one() - up
            } else {
                neg.mass_at_least(t.unsigned_abs())
            }),
            Family::SimpleWalk | Family::LazySimpleWalk { .. } => {
                let mut total = Rational::zero();
                for k in -1..=t.min(1) {
                    total += self.pmf(k)?;
                }
                Ok(total)
            }
            Family::HeavyTailRightContinuous { .. } => Err(Error::NotRational(self.name())),
            Family::RightExponential { .. } => Err(Error::NotLattice(self.name())),
        }
    }

    pub fn mass_at_most_f64(&self, t: i64) -> Result<f64> {
        if let Some(h) = &self.heavy {
            return Ok(if t >= 1 {
                1.0
            } else if t > -(h.k0 as i64) {
                1.0 - h.up
            } else {
                h.mass_at_least(t.unsigned_abs())
            });
        }
        self.mass_at_most(t).map(|p| rational::to_f64(&p))
    }

    /// One increment. Lattice families return exact integers.
    #[inline]
    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        self.sampler.sample(rng)
    }

    /// One increment conditioned on being positive.
    #[inline]
    pub fn sample_positive(&self, rng: &mut RandomStream) -> f64 {
        self.sampler.sample_positive(rng)
    }

    /// One increment conditioned on being non-zero.
    #[inline]
    pub fn sample_nonzero(&self, rng: &mut RandomStream) -> f64 {
        loop {
            let x = self.sampler.sample(rng);
            if x != 0.0 {
                return x;
            }
        }
    }

    pub fn to_config(&self) -> String {
        config::render(&self.family)
    }

    pub fn from_config(text: &str) -> Result<Self> {
        let map = crate::kv::parse(text)?;
        crate::kv::check_keys(&map, SPEC_KEYS)?;
        Self::new(config::family_from_map(&map)?)
    }

    pub fn from_map(map: &std::collections::BTreeMap<String, String>) -> Result<Self> {
        Self::new(config::family_from_map(map)?)
    }
}

/// Checks centering, mass and the right-continuity / right-exponentiality
/// of a family, and computes its lattice structure.
pub fn validate(family: &Family) -> Result<ValidationReport> {
    let mut report = ValidationReport {
        family: family.name(),
        total_mass: String::new(),
        mean: String::new(),
        right_continuous: false,
        right_exponential: false,
        lattice: None,
        alpha: 2.0,
    };
    let nonneg = |at: String, p: &Rational| -> Result<()> {
        if p.is_negative() {
            Err(Error::NegativeProbability { at, value: rational::format(p) })
        } else {
            Ok(())
        }
    };
    match family {
        Family::SimpleWalk => {
            report.right_continuous = true;
            report.lattice = Some(lattice_info(&[-1, 1], false));
            report.total_mass = "1/1".into();
            report.mean = "0/1".into();
        }
        Family::LazySimpleWalk { stay } => {
            nonneg("0".into(), stay)?;
            if stay >= &Rational::one() {
                return Err(Error::InvalidParameter("lazy walk needs stay < 1".into()));
            }
            report.right_continuous = true;
            let pts: &[i64] = if stay.is_zero() { &[-1, 1] } else { &[-1, 0, 1] };
            report.lattice = Some(lattice_info(pts, false));
            report.total_mass = "1/1".into();
            report.mean = "0/1".into();
        }
        Family::RightContinuousLattice { up, neg } => {
            nonneg("1".into(), up)?;
            for (k, p) in neg.head.iter().enumerate() {
                nonneg(format!("-{k}"), p)?;
            }
            if let Some(t) = &neg.tail {
                nonneg(format!("-{}", neg.head.len()), &t.first)?;
                if t.ratio.is_negative() || t.ratio >= Rational::one() {
                    return Err(Error::InvalidParameter("geometric tail ratio must lie in [0, 1)".into()));
                }
            }
            let [mass, first, _] = neg.moments();
            let total = up + &mass;
            let mean = up - &first;
            report.total_mass = rational::format(&total);
            report.mean = rational::format(&mean);
            if !total.is_one() {
                return Err(Error::MassDeficit { total: report.total_mass });
            }
            if !mean.is_zero() {
                return Err(Error::NonCentered { mean: report.mean });
            }
            if up.is_zero() {
                return Err(Error::InvalidParameter("degenerate law: all mass at 0".into()));
            }
            report.right_continuous = true;
            let (mut pts, run) = neg.support_points();
            pts.push(1);
            report.lattice = Some(lattice_info(&pts, run));
        }
        Family::RightExponential { pos_prob, rate, neg } => {
            let p = *pos_prob;
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!("pos_prob {p} must lie in (0, 1)")));
            }
            if !(*rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidParameter(format!("rate {rate} must be positive")));
            }
            match *neg {
                NegativePart::Exponential { rate } if !(rate > 0.0 && rate.is_finite()) => {
                    return Err(Error::InvalidParameter(format!("negative rate {rate} must be positive")));
                }
                NegativePart::Uniform { width } if !(width > 0.0 && width.is_finite()) => {
                    return Err(Error::InvalidParameter(format!("negative width {width} must be positive")));
                }
                _ => {}
            }
            let pos_mean = p / rate;
            let neg_mean = (1.0 - p) * neg.mean();
            let mean = pos_mean - neg_mean;
            report.total_mass = "1".into();
            report.mean = format!("{mean}");
            if mean.abs() > 1e-12 * (pos_mean + neg_mean) {
                return Err(Error::NonCentered { mean: report.mean });
            }
            report.right_exponential = true;
        }
        Family::HeavyTailRightContinuous { alpha, k0 } => {
            if !(*alpha > 1.0 && *alpha < 2.0) {
                return Err(Error::InvalidParameter(format!("alpha {alpha} must lie in (1, 2)")));
            }
            if *k0 == 0 {
                return Err(Error::InvalidParameter("k0 must be at least 1".into()));
            }
            report.total_mass = "1".into();
            report.mean = "0".into();
            report.right_continuous = true;
            report.alpha = *alpha;
            report.lattice = Some(LatticeInfo { span: 1, subspan: 1, shift: 0 });
        }
    }
    Ok(report)
}

fn exact_moments(family: &Family) -> Option<ExactMoments> {
    match family {
        Family::SimpleWalk => Some(ExactMoments {
            mean: Rational::zero(),
            variance: Rational::one(),
            e_abs: Rational::one(),
            pos_prob: ratio(1, 2),
        }),
        Family::LazySimpleWalk { stay } => {
            let move_prob = Rational::one() - stay;
            Some(ExactMoments {
                mean: Rational::zero(),
                variance: move_prob.clone(),
                e_abs: move_prob.clone(),
                pos_prob: move_prob / int(2),
            })
        }
        Family::RightContinuousLattice { up, neg } => {
            let [_, first, second] = neg.moments();
            Some(ExactMoments { mean: up - &first, variance: up + second, e_abs: up + first, pos_prob: up.clone() })
        }
        _ => None,
    }
}

/// `pts` are support points; `run` marks a support containing two
/// consecutive integers beyond the listed ones.
fn lattice_info(pts: &[i64], run: bool) -> LatticeInfo {
    let span = pts.iter().fold(0i64, |g, &x| g.gcd(&x)).max(1);
    let base = pts[0] / span;
    let mut sub = pts.iter().fold(0i64, |g, &x| g.gcd(&(x / span - base)));
    if run {
        sub = 1;
    }
    let sub = sub.max(1);
    LatticeInfo { span: span as u64, subspan: sub as u64, shift: base.rem_euclid(sub) as u64 }
}
