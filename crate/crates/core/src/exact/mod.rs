//! Exact computation for lattice walks: `p_N`, the bridge `p*_N`, first
//! cycle laws and enumeration oracles.

mod cycle;
mod dp;
mod enumerate;
mod table;

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::rational::Rational;

pub use cycle::{
    audit_csv_row, cycle_law_csv, describe_audit, exact_cycle_law, leave_zero_fit, leave_zero_length_law,
    symmetry_audit, CycleLaw, LeaveZeroFit, SymmetryAudit, AUDIT_HEADER, CYCLE_BUDGET, CYCLE_LAW_HEADER,
};
pub use dp::{
    exact_bridge_parts, exact_bridge_persistence, exact_persistence, exact_persistence_with_budget, exact_trace,
    float_persistence, float_persistence_with_budget, BridgeParts, FloatPersistence, DEFAULT_BUDGET,
};
pub use enumerate::{disregard_sandwich, enumerate_cycle_minimum, enumerate_persistence, Sandwich, PATH_LIMIT};
pub(crate) use table::{count_to_rational, windowed_laws, Mass, StepTable};

/// Finite law with exact rational masses; may be a sub-probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDist<K: Ord = (i64, i64)> {
    atoms: BTreeMap<K, Rational>,
    total: Rational,
}

impl<K: Ord> Default for ExactDist<K> {
    fn default() -> Self {
        Self { atoms: BTreeMap::new(), total: Rational::zero() }
    }
}

impl<K: Ord> ExactDist<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds mass to an atom. Zero masses are not stored.
    pub fn add(&mut self, key: K, mass: Rational) {
        if mass.is_zero() {
            return;
        }
        assert!(mass > Rational::zero(), "atom masses are nonnegative");
        self.total += &mass;
        *self.atoms.entry(key).or_insert_with(Rational::zero) += mass;
    }

    pub fn get(&self, key: &K) -> Rational {
        self.atoms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn atoms(&self) -> &BTreeMap<K, Rational> {
        &self.atoms
    }

    pub fn total(&self) -> &Rational {
        &self.total
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl<K: Ord> FromIterator<(K, Rational)> for ExactDist<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        let mut d = Self::new();
        for (k, m) in iter {
            d.add(k, m);
        }
        d
    }
}

/// One frontier of the `(S, A)` program after `step` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct StateLayer {
    pub step: usize,
    pub states: BTreeMap<(i64, i64), Rational>,
    pub absorbed_success: Rational,
    pub absorbed_failure: Rational,
}

impl StateLayer {
    /// Frontier plus absorbed mass; 1 at every step.
    pub fn total(&self) -> Rational {
        self.states.values().fold(&self.absorbed_success + &self.absorbed_failure, |acc, m| acc + m)
    }
}

pub const CSV_HEADER: &str = "spec_id,n,quantity,value_num,value_den";

/// One CSV row; `quantity` is `pN` or `pStarN`.
pub fn csv_row(spec_id: &str, n: usize, quantity: &str, value: &Rational) -> String {
    format!("{spec_id},{n},{quantity},{},{}", value.numer(), value.denom())
}

#[cfg(test)]
mod tests;
