//! Forward dynamic program over `(S_k, A_k)` for `p_N` and the bridge.
//!
//! A jump that drives `A` to zero or below is routed to the failure bucket
//! in closed form, so unbounded negative tails need no truncation. With a
//! support bounded below by `-L`, a state whose worst continuation (all
//! remaining jumps equal to `-L`) keeps `A` positive is absorbed as a
//! success.

use std::collections::BTreeMap;
use std::ops::Mul;

use num_bigint::BigUint;

use super::table::{count_to_rational, full_laws, return_probability, StepTable, Window};
use super::{Mass, StateLayer};
use crate::error::{Error, Result};
use crate::increments::IncrementSpec;
use crate::rational::Rational;

/// Default number of transitions a single query may perform.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

type Layer<M> = BTreeMap<(i64, i64), M>;

pub(crate) struct Outcome<M> {
    pub success: M,
    pub pruned: M,
    /// `P(min A > 0, S_n = 0)` when requested.
    pub bridge: Option<M>,
    pub transitions: u64,
}

pub(crate) struct Run<'a, M> {
    pub table: &'a StepTable<M>,
    pub n: usize,
    pub budget: u64,
    /// Laws of `S_m` used to finish absorbed bridge states.
    pub bridge: Option<&'a [Window<M>]>,
    /// States lighter than this are dropped (floating point only).
    pub prune: f64,
}

/// Upper bound on `A + S` before the last step, which bounds the jumps a
/// table must resolve for an unbounded support.
pub(crate) fn jump_depth(n: usize) -> usize {
    n * (n + 3) / 2 + 1
}

fn absorbed(s: i64, a: i64, m: usize, max_down: Option<usize>) -> bool {
    if m == 0 {
        return true;
    }
    let Some(l) = max_down else { return false };
    let (s, a, m, l) = (s as i128, a as i128, m as i128, l as i128);
    // A + jS - L j(j+1)/2 is concave in j: check both ends
    a + s - l > 0 && a + m * s - l * m * (m + 1) / 2 > 0
}

impl<'a, M: Mass> Run<'a, M>
where
    for<'b> &'b M: Mul<&'b M, Output = M>,
{
    pub fn execute(&self, mut observe: impl FnMut(usize, &Layer<M>, &M, &M, &M)) -> Result<Outcome<M>> {
        let t = self.table;
        let mut layer: Layer<M> = BTreeMap::new();
        layer.insert((0, 0), M::one());
        let mut success = M::zero();
        let mut failure = M::zero();
        let mut pruned = M::zero();
        let mut bridge = self.bridge.map(|_| M::zero());
        let mut transitions = 0u64;
        observe(0, &layer, &success, &failure, &pruned);
        for k in 0..self.n {
            let m = self.n - k - 1;
            success = &success * &t.scale;
            failure = &failure * &t.scale;
            pruned = &pruned * &t.scale;
            let mut next: Layer<M> = BTreeMap::new();
            for (&(s, a), mass) in &layer {
                let c = a + s;
                if c < 0 {
                    failure += &(mass * &t.scale);
                    continue;
                }
                failure += &(mass * &t.tail_at(c as usize));
                let lowest = (1 - c).max(t.lowest_jump());
                for x in lowest..=1 {
                    let w = t.weight(x).expect("jump inside table");
                    if w.is_zero() {
                        continue;
                    }
                    transitions += 1;
                    if transitions > self.budget {
                        return Err(Error::StateBudgetExceeded { budget: self.budget, step: k + 1 });
                    }
                    let (s2, a2) = (s + x, c + x);
                    let flow = mass * w;
                    if absorbed(s2, a2, m, t.max_down) {
                        if let (Some(b), Some(laws)) = (bridge.as_mut(), self.bridge) {
                            *b += &(&flow * &laws[m].at(-s2));
                        }
                        success += &flow;
                    } else {
                        *next.entry((s2, a2)).or_insert_with(M::zero) += &flow;
                    }
                }
            }
            if self.prune > 0.0 {
                next.retain(|_, v| {
                    if v.negligible(self.prune) {
                        pruned += &*v;
                        false
                    } else {
                        true
                    }
                });
            }
            layer = next;
            observe(k + 1, &layer, &success, &failure, &pruned);
        }
        debug_assert!(layer.is_empty());
        Ok(Outcome { success, pruned, bridge, transitions })
    }
}

/// Exact `P(A_1 > 0, ..., A_n > 0)`.
pub fn exact_persistence(spec: &IncrementSpec, n: usize) -> Result<Rational> {
    exact_persistence_with_budget(spec, n, DEFAULT_BUDGET)
}

pub fn exact_persistence_with_budget(spec: &IncrementSpec, n: usize, budget: u64) -> Result<Rational> {
    let (table, scale) = StepTable::counts(spec, jump_depth(n))?;
    let out = Run { table: &table, n, budget, bridge: None, prune: 0.0 }.execute(|_, _, _, _, _| {})?;
    Ok(count_to_rational(&out.success, &scale, n))
}

/// Floating-point `p_n` with the mass dropped by pruning as an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatPersistence {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub transitions: u64,
}

pub fn float_persistence(spec: &IncrementSpec, n: usize, prune: f64) -> Result<FloatPersistence> {
    float_persistence_with_budget(spec, n, prune, DEFAULT_BUDGET)
}

pub fn float_persistence_with_budget(
    spec: &IncrementSpec,
    n: usize,
    prune: f64,
    budget: u64,
) -> Result<FloatPersistence> {
    let table = StepTable::float(spec, jump_depth(n))?;
    let out = Run { table: &table, n, budget, bridge: None, prune }.execute(|_, _, _, _, _| {})?;
    // summation error of at most one rounding per transition
    let slack = out.success * f64::EPSILON * out.transitions as f64;
    Ok(FloatPersistence {
        value: out.success,
        lower: (out.success - slack).max(0.0),
        upper: out.success + out.pruned + slack,
        transitions: out.transitions,
    })
}

/// Every layer of the rational program, for inspection.
pub fn exact_trace(spec: &IncrementSpec, n: usize) -> Result<Vec<StateLayer>> {
    let (table, scale) = StepTable::counts(spec, jump_depth(n))?;
    let mut layers = Vec::with_capacity(n + 1);
    Run { table: &table, n, budget: DEFAULT_BUDGET, bridge: None, prune: 0.0 }.execute(
        |step, layer, success, failure, _| {
            layers.push(StateLayer {
                step,
                states: layer.iter().map(|(&k, v)| (k, count_to_rational(v, &scale, step))).collect(),
                absorbed_success: count_to_rational(success, &scale, step),
                absorbed_failure: count_to_rational(failure, &scale, step),
            });
        },
    )?;
    Ok(layers)
}

/// Numerator and denominator of the bridge probability.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeParts {
    /// `P(min_{k<=n} A_k > 0, S_n = 0)`.
    pub joint: Rational,
    /// `P(S_n = 0)`.
    pub zero: Rational,
    pub value: Rational,
}

/// Exact `P(A_1 > 0, ..., A_n > 0 | S_n = 0)`.
pub fn exact_bridge_persistence(spec: &IncrementSpec, n: usize) -> Result<Rational> {
    Ok(exact_bridge_parts(spec, n)?.value)
}

pub fn exact_bridge_parts(spec: &IncrementSpec, n: usize) -> Result<BridgeParts> {
    let zero = return_probability(spec, n)?;
    if num_traits::Zero::is_zero(&zero) {
        return Err(Error::NotInBridgeSet { n });
    }
    let (table, scale) = StepTable::counts(spec, jump_depth(n))?;
    let laws: Vec<Window<BigUint>> = match table.max_down {
        Some(_) => full_laws(&table, n),
        // without absorption only the last layer is finished, at S = 0
        None => vec![Window { lo: 0, mass: vec![num_traits::One::one()], below: num_traits::Zero::zero() }],
    };
    let run = Run { table: &table, n, budget: DEFAULT_BUDGET, bridge: Some(&laws), prune: 0.0 };
    let out = run.execute(|_, _, _, _, _| {})?;
    let joint = count_to_rational(&out.bridge.expect("bridge requested"), &scale, n);
    let value = &joint / &zero;
    Ok(BridgeParts { joint, zero, value })
}
