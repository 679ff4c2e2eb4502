//! Step-law tables shared by the exact dynamic programs.
//!
//! Rational laws are scaled by a common denominator `D` so that every weight
//! is an integer; a mass after `k` steps is then a count over `D^k`.

use std::fmt::Debug;
use std::ops::{AddAssign, Mul};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::increments::IncrementSpec;
use crate::rational::Rational;

pub(crate) trait Mass:
    Clone + Debug + PartialEq + Zero + One + for<'a> AddAssign<&'a Self> + Send + Sync
where
    for<'a> &'a Self: Mul<&'a Self, Output = Self>,
{
    fn negligible(&self, _floor: f64) -> bool {
        false
    }
}

impl Mass for BigUint {}

impl Mass for f64 {
    fn negligible(&self, floor: f64) -> bool {
        *self < floor
    }
}

/// Weights of the jumps `+1, 0, -1, ..., -kmax` and of the tails
/// `{X <= -k}`, all multiplied by `scale`.
#[derive(Debug, Clone)]
pub(crate) struct StepTable<M> {
    pub up: M,
    /// `down[k]` weighs the jump `-k`.
    pub down: Vec<M>,
    /// `tail[k]` weighs `{X <= -k}` for `k <= kmax + 1`.
    pub tail: Vec<M>,
    /// Largest downward jump when the support is bounded.
    pub max_down: Option<usize>,
    pub scale: M,
}

impl<M: Mass> StepTable<M>
where
    for<'a> &'a M: Mul<&'a M, Output = M>,
{
    /// Weight of the jump `x`.
    #[inline]
    pub fn weight(&self, x: i64) -> Option<&M> {
        match x {
            1 => Some(&self.up),
            x if x <= 0 => self.down.get((-x) as usize),
            _ => None,
        }
    }

    /// Weight of `{X <= -k}`, `k >= 0`.
    #[inline]
    pub fn tail_at(&self, k: usize) -> M {
        match self.tail.get(k) {
            Some(m) => m.clone(),
            None => {
                assert!(self.max_down.is_some(), "step table too short for an unbounded law");
                M::zero()
            }
        }
    }

    /// Smallest jump considered: `-max_down` or `-kmax`.
    pub fn lowest_jump(&self) -> i64 {
        -(self.down.len() as i64 - 1)
    }
}

fn check_lattice(spec: &IncrementSpec) -> Result<()> {
    if !spec.is_lattice() {
        return Err(Error::NotLattice(spec.name()));
    }
    Ok(())
}

/// Number of downward jumps a table must resolve: `kmax` for unbounded
/// laws, the support bound otherwise.
fn resolved_depth(spec: &IncrementSpec, kmax: usize) -> Result<(usize, Option<usize>)> {
    Ok(match spec.min_jump()? {
        Some(lo) => {
            let l = (-lo).max(0) as usize;
            (l, Some(l))
        }
        None => (kmax, None),
    })
}

impl StepTable<BigUint> {
    pub fn counts(spec: &IncrementSpec, kmax: usize) -> Result<(Self, BigUint)> {
        check_lattice(spec)?;
        if !spec.is_rational() {
            return Err(Error::NotRational(spec.name()));
        }
        let (depth, max_down) = resolved_depth(spec, kmax)?;
        let up = spec.pmf(1)?;
        let down: Vec<Rational> = (0..=depth as i64).map(|k| spec.pmf(-k)).collect::<Result<_>>()?;
        let tail: Vec<Rational> = (0..=depth as i64 + 1).map(|k| spec.mass_at_most(-k)).collect::<Result<_>>()?;
        let mut den = BigInt::one();
        for r in std::iter::once(&up).chain(&down).chain(&tail) {
            den = den.lcm(r.denom());
        }
        let to_count = |r: &Rational| -> BigUint {
            let v = r.numer() * (&den / r.denom());
            debug_assert!(!v.is_negative());
            v.to_biguint().expect("probabilities are nonnegative")
        };
        let scale = den.to_biguint().expect("denominators are positive");
        let table = StepTable {
            up: to_count(&up),
            down: down.iter().map(to_count).collect(),
            tail: tail.iter().map(to_count).collect(),
            max_down,
            scale: scale.clone(),
        };
        Ok((table, scale))
    }
}

impl StepTable<f64> {
    pub fn float(spec: &IncrementSpec, kmax: usize) -> Result<Self> {
        check_lattice(spec)?;
        let (depth, max_down) = resolved_depth(spec, kmax)?;
        Ok(StepTable {
            up: spec.pmf_f64(1)?,
            down: (0..=depth as i64).map(|k| spec.pmf_f64(-k)).collect::<Result<_>>()?,
            tail: (0..=depth as i64 + 1).map(|k| spec.mass_at_most_f64(-k)).collect::<Result<_>>()?,
            max_down,
            scale: 1.0,
        })
    }
}

/// Converts a count over `scale^steps` to a rational.
pub(crate) fn count_to_rational(count: &BigUint, scale: &BigUint, steps: usize) -> Rational {
    Rational::new(BigInt::from(count.clone()), BigInt::from(num_traits::pow(scale.clone(), steps)))
}

/// Law of `S_k` restricted to `S_k >= floor_k`, with the mass below lumped.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Window<M> {
    /// Value of `S_k` at index 0.
    pub lo: i64,
    pub mass: Vec<M>,
    pub below: M,
}

impl<M: Mass> Window<M>
where
    for<'a> &'a M: Mul<&'a M, Output = M>,
{
    pub fn at(&self, j: i64) -> M {
        if j < self.lo {
            return M::zero();
        }
        self.mass.get((j - self.lo) as usize).cloned().unwrap_or_else(M::zero)
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.mass.len() as i64 - 1
    }
}

/// Laws of `S_0..S_n`, each kept exactly on `S_k >= -(n - k)`: mass below can
/// never climb back to 0 by time `n` with unit up-steps. Needs `table` to
/// resolve jumps down to `-n`.
pub(crate) fn windowed_laws<M: Mass>(table: &StepTable<M>, n: usize) -> Vec<Window<M>>
where
    for<'a> &'a M: Mul<&'a M, Output = M>,
{
    let mut out = Vec::with_capacity(n + 1);
    out.push(Window { lo: 0, mass: vec![M::one()], below: M::zero() });
    for k in 1..=n {
        let prev = &out[k - 1];
        let lo = -((n - k) as i64);
        let hi = prev.hi() + 1;
        let mut mass = vec![M::zero(); (hi - lo + 1) as usize];
        let mut below = &prev.below * &table.scale;
        for (i, m) in prev.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let s = prev.lo + i as i64;
            // jumps x with s + x >= lo, i.e. x >= lo - s
            let min_x = lo - s;
            let deepest = table.lowest_jump().max(min_x);
            for x in deepest..=1 {
                if let Some(w) = table.weight(x) {
                    if !w.is_zero() {
                        mass[(s + x - lo) as usize] += &(m * w);
                    }
                }
            }
            // everything at or below lo - s - 1
            let cut = (s - lo + 1).max(0) as usize;
            below += &(m * &table.tail_at(cut));
        }
        out.push(Window { lo, mass, below });
    }
    out
}

/// Full laws of `S_0..S_n` for a bounded support.
pub(crate) fn full_laws<M: Mass>(table: &StepTable<M>, n: usize) -> Vec<Window<M>>
where
    for<'a> &'a M: Mul<&'a M, Output = M>,
{
    let l = table.max_down.expect("full laws need a bounded support") as i64;
    let mut out: Vec<Window<M>> = Vec::with_capacity(n + 1);
    out.push(Window { lo: 0, mass: vec![M::one()], below: M::zero() });
    for k in 1..=n {
        let prev = &out[k - 1];
        let lo = prev.lo - l;
        let mut mass = vec![M::zero(); (prev.hi() + 1 - lo + 1) as usize];
        for (i, m) in prev.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let s = prev.lo + i as i64;
            for x in -l..=1 {
                let w = table.weight(x).expect("bounded table covers its support");
                if !w.is_zero() {
                    mass[(s + x - lo) as usize] += &(m * w);
                }
            }
        }
        out.push(Window { lo, mass, below: M::zero() });
    }
    out
}

/// `P(S_n = 0)` in exact arithmetic.
pub(crate) fn return_probability(spec: &IncrementSpec, n: usize) -> Result<Rational> {
    let (table, scale) = StepTable::counts(spec, n)?;
    let laws = windowed_laws(&table, n);
    Ok(count_to_rational(&laws[n].at(0), &scale, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn simple_walk_weights() {
        let (t, d) = StepTable::counts(&IncrementSpec::simple(), 5).unwrap();
        assert_eq!(d, BigUint::from(2u32));
        assert_eq!(t.up, BigUint::from(1u32));
        assert_eq!(t.down, vec![BigUint::zero(), BigUint::one()]);
        assert_eq!(t.tail_at(0), BigUint::one());
        assert_eq!(t.tail_at(1), BigUint::one());
        assert_eq!(t.tail_at(2), BigUint::zero());
        assert_eq!(t.tail_at(10), BigUint::zero());
    }

    #[test]
    fn geometric_weights_are_integral() {
        let spec = IncrementSpec::geometric_right_continuous();
        let (t, d) = StepTable::counts(&spec, 10).unwrap();
        for k in 0..=10usize {
            let w = count_to_rational(&t.down[k], &d, 1);
            assert_eq!(w, spec.pmf(-(k as i64)).unwrap());
            assert_eq!(count_to_rational(&t.tail_at(k), &d, 1), spec.mass_at_most(-(k as i64)).unwrap());
        }
    }

    #[test]
    fn return_probabilities() {
        let s = IncrementSpec::simple();
        assert_eq!(return_probability(&s, 2).unwrap(), ratio(1, 2));
        assert_eq!(return_probability(&s, 3).unwrap(), Rational::zero());
        assert_eq!(return_probability(&s, 4).unwrap(), ratio(3, 8));
        assert_eq!(return_probability(&s, 20).unwrap(), crate::rational::central_binomial_over_four_pow(10));
        // geometric: P(S_1 = 0) = 0, P(S_2 = 0) = 2 P(1) P(-1)
        let g = IncrementSpec::geometric_right_continuous();
        assert_eq!(return_probability(&g, 1).unwrap(), Rational::zero());
        assert_eq!(return_probability(&g, 2).unwrap(), ratio(2, 9));
    }

    #[test]
    fn windows_conserve_mass() {
        let g = IncrementSpec::geometric_right_continuous();
        let (t, d) = StepTable::counts(&g, 12).unwrap();
        let laws = windowed_laws(&t, 12);
        for (k, w) in laws.iter().enumerate() {
            let mut total = w.below.clone();
            for m in &w.mass {
                total += m;
            }
            assert_eq!(total, num_traits::pow(d.clone(), k));
        }
        let s = IncrementSpec::lazy(ratio(1, 3)).unwrap();
        let (t, d) = StepTable::counts(&s, 9).unwrap();
        let full = full_laws(&t, 9);
        let win = windowed_laws(&t, 9);
        for k in 0..=9 {
            for j in -(9 - k as i64)..=k as i64 {
                assert_eq!(full[k].at(j), win[k].at(j));
            }
            let total: BigUint = full[k].mass.iter().sum();
            assert_eq!(total, num_traits::pow(d.clone(), k));
        }
    }
}
