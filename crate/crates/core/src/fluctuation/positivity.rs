use std::fmt;
use std::ops::{Add, Div, Mul};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{count_to_rational, windowed_laws, Mass, StepTable};
use crate::increments::IncrementSpec;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PositivityMode {
    /// `P(S_n > 0)`.
    Strict,
    /// `P(S_n >= 0)`.
    Weak,
}

impl fmt::Display for PositivityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PositivityMode::Strict => "strict",
            PositivityMode::Weak => "weak",
        })
    }
}

impl std::str::FromStr for PositivityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Self::Strict),
            "weak" => Ok(Self::Weak),
            _ => Err(Error::Parse(format!("unknown positivity mode {s:?}"))),
        }
    }
}

/// `P(S_n > 0)` (or `>= 0`) for `n = 1..=len`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivitySeq<T = Rational> {
    pub mode: PositivityMode,
    /// `probs[n - 1]` belongs to time `n`.
    pub probs: Vec<T>,
}

impl<T: Clone> PositivitySeq<T> {
    pub fn new(mode: PositivityMode, probs: Vec<T>) -> Self {
        Self { mode, probs }
    }

    pub fn constant(mode: PositivityMode, value: T, len: usize) -> Self {
        Self { mode, probs: vec![value; len] }
    }

    /// Value at time `n >= 1`.
    pub fn get(&self, n: usize) -> &T {
        &self.probs[n - 1]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl PositivitySeq<Rational> {
    pub fn to_f64(&self) -> PositivitySeq<f64> {
        PositivitySeq { mode: self.mode, probs: self.probs.iter().map(rational::to_f64).collect() }
    }
}

/// Budget on convolution transitions for one positivity query.
pub const CONVOLUTION_BUDGET: u64 = 100_000_000;

fn check_budget(spec: &IncrementSpec, n_max: usize) -> Result<()> {
    let depth = match spec.min_jump()? {
        Some(lo) => (2 - lo) as u64,
        None => n_max as u64 + 2,
    };
    let n = n_max as u64;
    // window width is at most 2 n_max + 1 at every step
    let work = n.saturating_mul(2 * n + 1).saturating_mul(depth.min(n + 2));
    if work > CONVOLUTION_BUDGET {
        return Err(Error::StateBudgetExceeded { budget: CONVOLUTION_BUDGET, step: 0 });
    }
    Ok(())
}

fn tally<M: Mass>(table: &StepTable<M>, n_max: usize, mode: PositivityMode) -> Vec<M>
where
    for<'a> &'a M: Mul<&'a M, Output = M>,
{
    // the window at time k keeps S_k >= -(n_max - k) exactly, so every value
    // >= 0 is exact
    let first = match mode {
        PositivityMode::Strict => 1,
        PositivityMode::Weak => 0,
    };
    windowed_laws(table, n_max)
        .iter()
        .skip(1)
        .map(|w| {
            let mut acc = M::zero();
            for j in first..=w.hi() {
                acc += &w.at(j);
            }
            acc
        })
        .collect()
}

/// Exact `P(S_n > 0)` (or `>= 0`) for `n = 1..=n_max` by iterated convolution.
pub fn positivity_probs(spec: &IncrementSpec, n_max: usize, mode: PositivityMode) -> Result<PositivitySeq> {
    check_budget(spec, n_max)?;
    let (table, scale) = StepTable::counts(spec, n_max + 1)?;
    let counts = tally(&table, n_max, mode);
    let probs = counts.iter().enumerate().map(|(i, c)| count_to_rational(c, &scale, i + 1)).collect();
    Ok(PositivitySeq { mode, probs })
}

/// Floating-point version, also available for irrational laws.
pub fn positivity_probs_f64(spec: &IncrementSpec, n_max: usize, mode: PositivityMode) -> Result<PositivitySeq<f64>> {
    check_budget(spec, n_max)?;
    let table = StepTable::float(spec, n_max + 1)?;
    Ok(PositivitySeq { mode, probs: tally(&table, n_max, mode) })
}

/// Field operations needed by the recursion.
pub trait Scalar:
    Clone + Zero + Add<Output = Self> + for<'a> Mul<&'a Self, Output = Self> + Div<Output = Self>
{
    fn one_value() -> Self;
    fn from_count(n: usize) -> Self;
}

impl Scalar for Rational {
    fn one_value() -> Self {
        rational::int(1)
    }

    fn from_count(n: usize) -> Self {
        rational::int(n as i64)
    }
}

impl Scalar for f64 {
    fn one_value() -> Self {
        1.0
    }

    fn from_count(n: usize) -> Self {
        n as f64
    }
}

/// `q_0..q_len` from `n q_n = sum_{k=1}^n probs[k] q_{n-k}`, `q_0 = 1`.
pub fn sparre_andersen<T: Scalar>(seq: &PositivitySeq<T>) -> Vec<T> {
    let mut q = Vec::with_capacity(seq.len() + 1);
    q.push(T::one_value());
    for n in 1..=seq.len() {
        let mut acc = T::zero();
        for k in 1..=n {
            acc = acc + seq.get(k).clone() * &q[n - k];
        }
        q.push(acc / T::from_count(n));
    }
    q
}

/// `C(2n, n) / 4^n`.
pub fn symmetric_continuous_qn(n: u64) -> Rational {
    rational::central_binomial_over_four_pow(n)
}

/// Partial sums of `sum_n (P(S_n > 0) - 1/alpha) / n`; entry `i` holds the
/// sum up to `n = i + 1`.
pub fn series_diagnostic(seq: &PositivitySeq<f64>, alpha: f64) -> Vec<f64> {
    let mut acc = 0.0;
    seq.probs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            acc += (p - 1.0 / alpha) / (i + 1) as f64;
            acc
        })
        .collect()
}

pub const SERIES_HEADER: &str = "n,partial_sum";
pub const POSITIVITY_HEADER: &str = "n,mode,num,den,q_num,q_den";
