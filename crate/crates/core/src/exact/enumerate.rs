//! Brute-force path enumeration, used as an oracle for the dynamic programs.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::increments::IncrementSpec;
use crate::rational::Rational;
use crate::walk::{decompose, CrossingConvention, Trajectory};

/// Largest number of paths (or visited nodes for unbounded supports).
pub const PATH_LIMIT: u64 = 100_000_000;

/// Jumps `(x, weight)` with integer weights over a common denominator.
struct Jumps {
    jumps: Vec<(i64, BigUint)>,
    den: BigUint,
}

fn jumps(spec: &IncrementSpec, deepest: i64) -> Result<Jumps> {
    let mut raw = Vec::new();
    for x in (deepest..=1).rev() {
        let p = spec.pmf(x)?;
        if !p.is_zero() {
            raw.push((x, p));
        }
    }
    let den = raw.iter().fold(BigInt::one(), |d, (_, p)| d.lcm(p.denom()));
    let jumps = raw
        .into_iter()
        .map(|(x, p)| {
            let w = p.numer() * (&den / p.denom());
            (x, w.to_biguint().expect("nonnegative"))
        })
        .collect();
    Ok(Jumps { jumps, den: den.to_biguint().expect("positive") })
}

fn support_jumps(spec: &IncrementSpec, n: usize) -> Result<Jumps> {
    match spec.min_jump()? {
        Some(lo) => {
            let j = jumps(spec, lo)?;
            let paths = (j.jumps.len() as f64).powi(n as i32);
            if paths > PATH_LIMIT as f64 {
                return Err(Error::TooLarge(format!("{} paths of length {n}", j.jumps.len())));
            }
            Ok(j)
        }
        // a surviving path never jumps below -(A + S) <= n(n+3)/2
        None => jumps(spec, -((n * (n + 3) / 2) as i64)),
    }
}

/// `P(A_1 > 0, ..., A_n > 0)` by summing the probabilities of all surviving
/// paths, one path at a time.
pub fn enumerate_persistence(spec: &IncrementSpec, n: usize) -> Result<Rational> {
    let j = support_jumps(spec, n)?;
    let mut total = BigUint::zero();
    let mut nodes = 0u64;
    let mut stack: Vec<(usize, i64, i64, BigUint)> = vec![(0, 0, 0, BigUint::one())];
    while let Some((depth, s, a, w)) = stack.pop() {
        if depth == n {
            total += w;
            continue;
        }
        for (x, p) in &j.jumps {
            let s2 = s + x;
            let a2 = a + s2;
            if a2 <= 0 {
                continue;
            }
            nodes += 1;
            if nodes > PATH_LIMIT {
                return Err(Error::TooLarge(format!("more than {PATH_LIMIT} surviving prefixes")));
            }
            stack.push((depth + 1, s2, a2, &w * p));
        }
    }
    let den = num_traits::pow(j.den, n);
    Ok(Rational::new(total.into(), den.into()))
}

/// Visits every path of length `n` with its weight.
fn for_each_path(
    spec: &IncrementSpec,
    n: usize,
    first: impl Fn(i64) -> bool,
    mut visit: impl FnMut(&[f64], &BigUint),
) -> Result<BigUint> {
    let j = support_jumps(spec, n)?;
    let mut path = vec![0.0; n];
    fn rec(
        j: &Jumps,
        depth: usize,
        w: &BigUint,
        path: &mut [f64],
        first: &dyn Fn(i64) -> bool,
        visit: &mut dyn FnMut(&[f64], &BigUint),
    ) {
        if depth == path.len() {
            visit(path, w);
            return;
        }
        for (x, p) in &j.jumps {
            if depth == 0 && !first(*x) {
                continue;
            }
            path[depth] = *x as f64;
            rec(j, depth + 1, &(w * p), path, first, visit);
        }
    }
    rec(&j, 0, &BigUint::one(), &mut path, &first, &mut visit);
    Ok(j.den)
}

/// `P(min_{1<=k<=η(n)} Ψ_k > 0 | S_1 > 0)` by enumerating the paths of length
/// `n + 1` (step `n + 1` reveals whether `n` is a crossing time).
pub fn enumerate_cycle_minimum(spec: &IncrementSpec, n: usize) -> Result<Rational> {
    let mut hit = BigUint::zero();
    let mut all = BigUint::zero();
    for_each_path(
        spec,
        n + 1,
        |x| x > 0,
        |xs, w| {
            all += w;
            let t = Trajectory::from_increments(xs);
            let rec = decompose(&t, CrossingConvention::WeakUp);
            let eta = rec.theta_big.iter().skip(1).filter(|&&b| b <= n).count();
            if rec.psi_big[1..=eta].iter().all(|&p| p > 0.0) {
                hit += w;
            }
        },
    )?;
    Ok(Rational::new(hit.into(), all.into()))
}

/// Both sides of the sandwich
/// `(1/2) P̃(min Ψ > 0) <= p_n / P(S_1 > 0) <= P̃(min Ψ > 0)`, by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich {
    pub n: usize,
    pub ratio: Rational,
    pub cycle_minimum: Rational,
}

impl Sandwich {
    pub fn holds(&self) -> bool {
        let half = &self.cycle_minimum / Rational::from_integer(2.into());
        half <= self.ratio && self.ratio <= self.cycle_minimum
    }
}

pub fn disregard_sandwich(spec: &IncrementSpec, n: usize) -> Result<Sandwich> {
    let p = enumerate_persistence(spec, n)?;
    let pos = spec.exact_moments()?.pos_prob.clone();
    Ok(Sandwich { n, ratio: p / pos, cycle_minimum: enumerate_cycle_minimum(spec, n)? })
}
