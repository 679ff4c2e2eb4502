//! Workloads shared by the benchmarks.

use persistence_core::fluctuation::BivariateIncrementSpec;
use persistence_core::rational::ratio;
use persistence_core::IncrementSpec;

/// Lattice laws timed by the exact programs, with their horizons.
pub fn exact_cases() -> Vec<(&'static str, IncrementSpec, usize)> {
    vec![
        ("simple", IncrementSpec::simple(), 64),
        ("lazy", IncrementSpec::lazy(ratio(1, 2)).expect("valid stay probability"), 48),
        ("geometric", IncrementSpec::geometric_right_continuous(), 32),
    ]
}

pub fn sampled_cases() -> Vec<(&'static str, IncrementSpec)> {
    vec![
        ("simple", IncrementSpec::simple()),
        ("laplace", IncrementSpec::laplace(1.0).expect("positive rate")),
        ("heavy-tail", IncrementSpec::heavy_tail(1.5, 1).expect("alpha in (1, 2)")),
    ]
}

pub fn halfplane_case() -> (BivariateIncrementSpec, usize) {
    (BivariateIncrementSpec::builtin("five-atom").expect("builtin law"), 6)
}
