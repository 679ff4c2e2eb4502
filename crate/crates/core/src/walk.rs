//! Trajectories, integrated sums and the cycle structure between crossings.
//!
//! A trajectory stores the walk `S_1..S_N` and its integrated sums
//! `A_1..A_N`, with `S_0 = A_0 = 0`. A crossing time under the default
//! convention is an `n >= 0` with `S_n <= 0 < S_{n+1}`; the cycles are the
//! stretches between consecutive crossings. Whether `n` is a crossing is only
//! known once `S_{n+1}` is drawn, so a trajectory of length `N` reveals the
//! crossings at times `0..N-1`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::Error;
use crate::increments::IncrementSpec;
use crate::rng::RandomStream;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `s[k - 1] = S_k`.
    pub s: Vec<f64>,
    /// `a[k - 1] = A_k`.
    pub a: Vec<f64>,
}

impl Trajectory {
    pub fn from_increments(xs: &[f64]) -> Self {
        let mut s = Vec::with_capacity(xs.len());
        let mut a = Vec::with_capacity(xs.len());
        let (mut pos, mut area) = (0.0, 0.0);
        for &x in xs {
            pos += x;
            area += pos;
            s.push(pos);
            a.push(area);
        }
        Self { s, a }
    }

    /// Builds a trajectory from walk positions `S_1..S_N`.
    pub fn from_walk(s: &[f64]) -> Self {
        let mut a = Vec::with_capacity(s.len());
        let mut area = 0.0;
        for &v in s {
            area += v;
            a.push(area);
        }
        Self { s: s.to_vec(), a }
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// `S_k` for `0 <= k <= n`.
    pub fn s_at(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.s[k - 1]
        }
    }

    /// `A_k` for `0 <= k <= n`.
    pub fn a_at(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.a[k - 1]
        }
    }

    pub fn increments(&self) -> Vec<f64> {
        (1..=self.n()).map(|k| self.s_at(k) - self.s_at(k - 1)).collect()
    }

    /// Writes one row per step: `k S_k A_k`.
    pub fn write_table(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "k\tS_k\tA_k")?;
        for k in 1..=self.n() {
            writeln!(w, "{k}\t{}\t{}", self.s_at(k), self.a_at(k))?;
        }
        Ok(())
    }
}

/// How the first step is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Start {
    #[default]
    Free,
    /// `S_1 > 0`, by rejection of the first step.
    Positive,
    /// `S_1 != 0`, by rejection of the first step.
    Nonzero,
}

#[inline]
pub fn first_step(spec: &IncrementSpec, rng: &mut RandomStream, start: Start) -> f64 {
    match start {
        Start::Free => spec.sample(rng),
        Start::Positive => loop {
            let x = spec.sample(rng);
            if x > 0.0 {
                return x;
            }
        },
        Start::Nonzero => spec.sample_nonzero(rng),
    }
}

pub fn simulate(spec: &IncrementSpec, n: usize, rng: &mut RandomStream, start: Start) -> Trajectory {
    let mut xs = Vec::with_capacity(n);
    if n > 0 {
        xs.push(first_step(spec, rng, start));
    }
    while xs.len() < n {
        xs.push(spec.sample(rng));
    }
    Trajectory::from_increments(&xs)
}

/// `A_k > 0` for every `1 <= k <= n`.
pub fn persistence_indicator(t: &Trajectory, n: usize) -> bool {
    t.a[..n].iter().all(|&a| a > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub enum CrossingConvention {
    /// `S_n <= 0 < S_{n+1}`.
    #[default]
    WeakUp,
    /// `S_n < 0 <= S_{n+1}`; time 0 counts when `S_1 > 0`.
    StrictUp,
    /// Up-crossing cycles cut at their last strictly negative time.
    LastNegative,
    /// `S_n = 0 != S_{n+1}`.
    LeaveZero,
}

impl CrossingConvention {
    pub const ALL: [CrossingConvention; 4] = [
        CrossingConvention::WeakUp,
        CrossingConvention::StrictUp,
        CrossingConvention::LastNegative,
        CrossingConvention::LeaveZero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CrossingConvention::WeakUp => "weak-up",
            CrossingConvention::StrictUp => "strict-up",
            CrossingConvention::LastNegative => "last-negative",
            CrossingConvention::LeaveZero => "leave-zero",
        }
    }

    /// Conditioning of the first step under which cycles start at time 0.
    pub fn start(self) -> Start {
        match self {
            CrossingConvention::LeaveZero => Start::Nonzero,
            _ => Start::Positive,
        }
    }
}

impl fmt::Display for CrossingConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CrossingConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CrossingConvention::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown crossing convention {s:?}")))
    }
}

/// A crossing detected by [`CrossingTracker`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub time: usize,
    /// `A` at the crossing time.
    pub area: f64,
    /// Last time with `S < 0` since the previous crossing, with `A` there.
    pub last_negative: Option<(usize, f64)>,
}

/// Streaming crossing detector. `LastNegative` tracks the up-crossings of
/// `WeakUp`; the cut points are read off [`Crossing::last_negative`].
#[derive(Debug, Clone)]
pub struct CrossingTracker {
    convention: CrossingConvention,
    time: usize,
    s: f64,
    a: f64,
    last_negative: Option<(usize, f64)>,
}

impl CrossingTracker {
    pub fn new(convention: CrossingConvention) -> Self {
        Self { convention, time: 0, s: 0.0, a: 0.0, last_negative: None }
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    fn is_crossing(&self, next: f64) -> bool {
        let s = self.s;
        match self.convention {
            CrossingConvention::WeakUp | CrossingConvention::LastNegative => s <= 0.0 && next > 0.0,
            CrossingConvention::StrictUp => {
                if self.time == 0 {
                    next > 0.0
                } else {
                    s < 0.0 && next >= 0.0
                }
            }
            CrossingConvention::LeaveZero => s == 0.0 && next != 0.0,
        }
    }

    /// Consumes the increment `S_{t+1} - S_t` and reports whether `t` was a
    /// crossing time.
    #[inline]
    pub fn push(&mut self, x: f64) -> Option<Crossing> {
        let next = self.s + x;
        let out = if self.is_crossing(next) {
            let c = Crossing { time: self.time, area: self.a, last_negative: self.last_negative };
            self.last_negative = None;
            Some(c)
        } else {
            None
        };
        self.time += 1;
        self.s = next;
        self.a += next;
        if next < 0.0 {
            self.last_negative = Some((self.time, self.a));
        }
        out
    }
}

/// Regeneration data of one trajectory. Index `k` of `theta`, `psi`,
/// `theta_hat`, `theta_plus` and `theta_minus` describes cycle `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub convention: CrossingConvention,
    /// `Θ_0, Θ_1, ...`; empty when no crossing was observed.
    pub theta_big: Vec<usize>,
    pub theta: Vec<usize>,
    pub psi: Vec<f64>,
    /// `Ψ_k = A_{Θ_k}`, starting with `Ψ_0`.
    pub psi_big: Vec<f64>,
    /// Number of complete cycles observed.
    pub eta: usize,
    /// Position within the cycle of its last strictly negative value, 0 if none.
    pub theta_hat: Vec<usize>,
    pub theta_plus: Vec<usize>,
    pub theta_minus: Vec<usize>,
}

/// Splits a trajectory into cycles. The part before `Θ_0` is discarded; the
/// last crossing visible in a trajectory of length `N` is at time `N - 1`.
pub fn decompose(t: &Trajectory, convention: CrossingConvention) -> CycleRecord {
    let mut tracker = CrossingTracker::new(convention);
    let mut bounds = Vec::new();
    for x in t.increments() {
        if let Some(c) = tracker.push(x) {
            let time = match (convention, bounds.is_empty(), c.last_negative) {
                (CrossingConvention::LastNegative, false, Some((ln, _))) => ln,
                _ => c.time,
            };
            bounds.push(time);
        }
    }
    let psi_big: Vec<f64> = bounds.iter().map(|&b| t.a_at(b)).collect();
    let mut rec = CycleRecord {
        convention,
        theta: bounds.windows(2).map(|w| w[1] - w[0]).collect(),
        psi: psi_big.windows(2).map(|w| w[1] - w[0]).collect(),
        eta: bounds.len().saturating_sub(1),
        theta_big: bounds,
        psi_big,
        theta_hat: Vec::new(),
        theta_plus: Vec::new(),
        theta_minus: Vec::new(),
    };
    for w in rec.theta_big.windows(2) {
        let (start, len) = (w[0], w[1] - w[0]);
        let rel = |j: usize| t.s_at(start + j);
        let hat = (1..=len).rev().find(|&j| rel(j) < 0.0).unwrap_or(0);
        let plus = (1..len).find(|&j| rel(j) >= 0.0 && rel(j + 1) < 0.0).unwrap_or(len);
        rec.theta_hat.push(hat);
        rec.theta_plus.push(plus);
        rec.theta_minus.push(len - plus);
    }
    rec
}

/// Right-hand side of the reduction of `{min_{k<=n} A_k > 0}` to the cycle
/// walk: `A_1 > 0`, `Ψ_k > 0` for every complete cycle and `A_n > 0`.
/// Between up-crossings `A` rises and then falls, so its minimum over a
/// cycle sits at an end point.
pub fn reduction_event(t: &Trajectory, n: usize) -> bool {
    if n == 0 {
        return true;
    }
    let prefix = Trajectory { s: t.s[..n].to_vec(), a: t.a[..n].to_vec() };
    let rec = decompose(&prefix, CrossingConvention::WeakUp);
    t.a[0] > 0.0 && t.a[n - 1] > 0.0 && rec.psi_big.iter().skip(1).all(|&p| p > 0.0)
}

/// One first cycle drawn under the start conditioning of the convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSample {
    pub theta: usize,
    pub psi: f64,
    pub theta_hat: usize,
    pub censored: bool,
}

/// Draws the first cycle. A cycle longer than `cap` is censored and reported
/// with `theta = cap` and the running area `A_cap`.
pub fn sample_cycle(
    spec: &IncrementSpec,
    rng: &mut RandomStream,
    cap: usize,
    convention: CrossingConvention,
) -> CycleSample {
    assert!(cap >= 1, "cycle cap must be positive");
    let mut tracker = CrossingTracker::new(convention);
    tracker.push(first_step(spec, rng, convention.start()));
    loop {
        let (time, area) = (tracker.time(), tracker.a());
        if let Some(c) = tracker.push(spec.sample(rng)) {
            let hat = c.last_negative.map_or(0, |(t, _)| t);
            return match (convention, c.last_negative) {
                (CrossingConvention::LastNegative, Some((t, a))) => {
                    CycleSample { theta: t, psi: a, theta_hat: hat, censored: false }
                }
                _ => CycleSample { theta: c.time, psi: c.area, theta_hat: hat, censored: false },
            };
        }
        if time == cap {
            // no crossing at `cap`, so the cycle is longer
            let hat = match tracker.last_negative {
                Some((t, _)) if t <= cap => t,
                _ => 0,
            };
            return CycleSample { theta: cap, psi: area, theta_hat: hat, censored: true };
        }
    }
}
