use num_traits::{One, Zero};

use super::*;
use crate::error::Error;
use crate::increments::IncrementSpec;
use crate::rational::{central_binomial_over_four_pow, ratio, Rational};
use crate::walk::CrossingConvention;

fn specs() -> Vec<IncrementSpec> {
    vec![
        IncrementSpec::simple(),
        IncrementSpec::lazy(ratio(1, 2)).unwrap(),
        IncrementSpec::geometric_right_continuous(),
    ]
}

#[test]
fn simple_walk_values() {
    let s = IncrementSpec::simple();
    assert_eq!(exact_persistence(&s, 1).unwrap(), ratio(1, 2));
    assert_eq!(exact_persistence(&s, 2).unwrap(), ratio(1, 2));
    assert_eq!(exact_persistence(&s, 3).unwrap(), ratio(3, 8));
    assert_eq!(enumerate_persistence(&s, 1).unwrap(), ratio(1, 2));
    assert_eq!(enumerate_persistence(&s, 3).unwrap(), ratio(3, 8));
}

#[test]
fn lazy_two_steps() {
    // S_1 = 1 (prob 1/4), then A_2 = 2 + X_2 > 0 for every X_2
    let s = IncrementSpec::lazy(ratio(1, 2)).unwrap();
    assert_eq!(enumerate_persistence(&s, 2).unwrap(), ratio(1, 4));
    assert_eq!(exact_persistence(&s, 2).unwrap(), ratio(1, 4));
}

#[test]
fn oracle_equivalence_small() {
    for spec in specs() {
        for n in 1..=9 {
            assert_eq!(
                exact_persistence(&spec, n).unwrap(),
                enumerate_persistence(&spec, n).unwrap(),
                "{} n={n}",
                spec.name()
            );
        }
    }
}

#[test]
fn oracle_equivalence_gapped_support() {
    let spec = IncrementSpec::new(crate::increments::Family::RightContinuousLattice {
        up: ratio(1, 2),
        neg: crate::increments::NegativeLattice::finite(vec![ratio(1, 4), ratio(1, 8), Rational::zero(), ratio(1, 8)]),
    })
    .unwrap();
    for n in 1..=8 {
        assert_eq!(exact_persistence(&spec, n).unwrap(), enumerate_persistence(&spec, n).unwrap());
    }
}

#[test]
fn persistence_is_monotone_and_bounded() {
    for spec in specs() {
        let pos = spec.exact_moments().unwrap().pos_prob.clone();
        let mut prev = Rational::one();
        for n in 1..=24 {
            let p = exact_persistence(&spec, n).unwrap();
            assert!(p <= prev && p <= pos, "{} n={n}", spec.name());
            prev = p;
        }
    }
}

#[test]
fn layers_conserve_mass() {
    for spec in specs() {
        for layer in exact_trace(&spec, 16).unwrap() {
            assert_eq!(layer.total(), Rational::one(), "{} step {}", spec.name(), layer.step);
            assert!(layer.states.keys().all(|&(_, a)| a > 0 || layer.step == 0));
        }
    }
}

#[test]
fn float_mode_tracks_rational() {
    for spec in specs() {
        let exact = crate::rational::to_f64(&exact_persistence(&spec, 20).unwrap());
        let f = float_persistence(&spec, 20, 0.0).unwrap();
        assert!((f.value - exact).abs() < 1e-12, "{}", spec.name());
        assert!(f.lower <= exact && exact <= f.upper);
        let pruned = float_persistence(&spec, 20, 1e-6).unwrap();
        assert!(pruned.lower <= exact && exact <= pruned.upper);
    }
    let heavy = IncrementSpec::heavy_tail(1.5, 1).unwrap();
    let f = float_persistence(&heavy, 3, 0.0).unwrap();
    // first step +1, then A_2 = 1 + S_2 > 0 needs S_2 >= 0, i.e. X_2 = +1 or X_2 = -1
    let up = heavy.pmf_f64(1).unwrap();
    let c = heavy.pmf_f64(-1).unwrap();
    let p2 = up * (up + c);
    assert!((float_persistence(&heavy, 2, 0.0).unwrap().value - p2).abs() < 1e-15);
    assert!(f.value < p2);
    assert!(matches!(exact_persistence(&heavy, 3), Err(Error::NotRational(_))));
    assert!(matches!(exact_persistence(&IncrementSpec::laplace(1.0).unwrap(), 3), Err(Error::NotLattice(_))));
}

#[test]
fn budget_is_enforced() {
    let err = exact_persistence_with_budget(&IncrementSpec::simple(), 40, 1000).unwrap_err();
    assert!(matches!(err, Error::StateBudgetExceeded { budget: 1000, .. }));
}

#[test]
fn enumeration_limits() {
    let lazy = IncrementSpec::lazy(ratio(1, 2)).unwrap();
    assert!(matches!(enumerate_persistence(&lazy, 17), Err(Error::TooLarge(_))));
}

#[test]
fn bridge_examples() {
    let s = IncrementSpec::simple();
    assert_eq!(exact_bridge_persistence(&s, 2).unwrap(), ratio(1, 2));
    assert_eq!(exact_bridge_persistence(&s, 4).unwrap(), ratio(1, 3));
    assert_eq!(exact_bridge_persistence(&s, 3), Err(Error::NotInBridgeSet { n: 3 }));
}

/// `P(min A > 0, S_n = 0)` by enumerating paths.
fn bridge_by_enumeration(spec: &IncrementSpec, n: usize) -> Rational {
    let lo = spec.min_jump().unwrap().unwrap_or(-(n as i64) - 1);
    let mut total = Rational::zero();
    let mut stack = vec![(0usize, 0i64, 0i64, Rational::one())];
    while let Some((k, s, a, w)) = stack.pop() {
        if k == n {
            if s == 0 {
                total += w;
            }
            continue;
        }
        for x in lo..=1 {
            let p = spec.pmf(x).unwrap();
            if p.is_zero() || a + s + x <= 0 {
                continue;
            }
            stack.push((k + 1, s + x, a + s + x, &w * p));
        }
    }
    total
}

#[test]
fn bridge_matches_enumeration() {
    for spec in specs() {
        for n in 2..=10 {
            let joint = bridge_by_enumeration(&spec, n);
            match exact_bridge_parts(&spec, n) {
                Ok(parts) => {
                    assert_eq!(parts.joint, joint, "{} n={n}", spec.name());
                    assert!(parts.joint <= parts.zero);
                }
                Err(Error::NotInBridgeSet { .. }) => assert!(joint.is_zero()),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn csv_rows() {
    assert_eq!(csv_row("simple", 3, "pN", &ratio(3, 8)), "simple,3,pN,3,8");
}

#[test]
fn cycle_law_weak_up_examples() {
    let s = IncrementSpec::simple();
    let law = exact_cycle_law(&s, 2, CrossingConvention::WeakUp).unwrap();
    assert_eq!(law.first.len(), 1);
    assert_eq!(law.first.get(&(2, 1)), ratio(1, 4));
    assert_eq!(law.residual, ratio(3, 4));

    let law = exact_cycle_law(&s, 4, CrossingConvention::WeakUp).unwrap();
    assert_eq!(law.first.get(&(4, 4)), ratio(1, 16));
    assert_eq!(law.first.get(&(4, 0)), ratio(1, 16));
    assert_eq!(law.first.len(), 3);
    assert_eq!(law.residual, ratio(5, 8));
}

#[test]
fn cycle_law_strict_up_example() {
    let law = exact_cycle_law(&IncrementSpec::simple(), 5, CrossingConvention::StrictUp).unwrap();
    let expected: ExactDist =
        [((3, 0), ratio(1, 8)), ((5, 3), ratio(1, 32)), ((5, -3), ratio(1, 32)), ((5, 1), ratio(1, 32))]
            .into_iter()
            .collect();
    assert_eq!(law.first, expected);
    assert_eq!(&law.residual + law.first.total(), Rational::one());
}

#[test]
fn cycle_law_matches_sampled_decomposition() {
    // exhaustive check against the walk module on every path of length 9
    let spec = IncrementSpec::lazy(ratio(1, 3)).unwrap();
    let horizon = 7;
    for conv in CrossingConvention::ALL {
        let law = exact_cycle_law(&spec, horizon, conv).unwrap();
        let mut brute = ExactDist::new();
        let len = horizon + 2;
        let steps = [-1i64, 0, 1];
        for code in 0..3usize.pow(len as u32) {
            let mut c = code;
            let xs: Vec<f64> = (0..len)
                .map(|_| {
                    let x = steps[c % 3];
                    c /= 3;
                    x as f64
                })
                .collect();
            let ok_first = match conv {
                CrossingConvention::LeaveZero => xs[0] != 0.0,
                _ => xs[0] > 0.0,
            };
            if !ok_first {
                continue;
            }
            let t = crate::walk::Trajectory::from_increments(&xs);
            let rec = crate::walk::decompose(&t, conv);
            let w: Rational = xs.iter().map(|&x| spec.pmf(x as i64).unwrap()).product();
            let norm = match conv {
                CrossingConvention::LeaveZero => ratio(2, 3),
                _ => ratio(1, 3),
            };
            // the last-negative cut is known once the up-crossing closes
            let closing = match conv {
                CrossingConvention::LastNegative => {
                    crate::walk::decompose(&t, CrossingConvention::WeakUp).theta.first().copied()
                }
                _ => rec.theta.first().copied(),
            };
            if closing.is_some_and(|c| c <= horizon) {
                brute.add((rec.theta[0] as i64, rec.psi[0] as i64), w / &norm);
            }
        }
        assert_eq!(law.first, brute, "{conv}");
        assert_eq!(&law.residual + law.first.total(), Rational::one());
    }
}

#[test]
fn cycle_law_unbounded_support() {
    let spec = IncrementSpec::geometric_right_continuous();
    for conv in CrossingConvention::ALL {
        let law = exact_cycle_law(&spec, 8, conv).unwrap();
        assert!(law.residual > Rational::zero());
        assert_eq!(&law.residual + law.first.total(), Rational::one());
        assert_eq!(law.hat.total(), law.first.total());
    }
    // right-continuous walks close the first up-crossing cycle with a +1 step
    let law = exact_cycle_law(&spec, 2, CrossingConvention::WeakUp).unwrap();
    // S_1 = 1, S_2 = 0 (jump -1, prob 1/6), S_3 = 1 (prob 2/3)
    assert_eq!(law.first.get(&(2, 1)), ratio(1, 9));
}

#[test]
fn symmetry_audit_examples() {
    let law: ExactDist = [((2, 1), ratio(1, 4))].into_iter().collect();
    let a = symmetry_audit(&law);
    assert_eq!(a.max_abs_asymmetry, ratio(1, 4));
    assert_eq!(a.worst_atom, Some((2, 1)));

    let zero: ExactDist = [((3, 0), ratio(1, 8)), ((4, 0), ratio(1, 2))].into_iter().collect();
    assert_eq!(symmetry_audit(&zero).max_abs_asymmetry, Rational::zero());

    let pair: ExactDist = [((5, 3), ratio(1, 32)), ((5, -3), ratio(1, 32))].into_iter().collect();
    let a = symmetry_audit(&pair);
    assert_eq!(a.max_abs_asymmetry, Rational::zero());
    assert_eq!(a.worst_atom, None);
}

#[test]
fn leave_zero_law_of_simple_walk() {
    let law = leave_zero_length_law(&IncrementSpec::simple(), 64).unwrap();
    // first return to zero: P(θ* = 2m) = C(2m, m) / ((2m - 1) 4^m)
    for m in 1..=32usize {
        let exact = crate::rational::to_f64(&central_binomial_over_four_pow(m as u64)) / (2 * m - 1) as f64;
        assert!((law[2 * m] - exact).abs() < 1e-15, "m={m}");
        assert_eq!(law[2 * m - 1], 0.0);
    }
}

#[test]
fn leave_zero_fit_of_simple_walk() {
    let fit = leave_zero_fit(&IncrementSpec::simple(), 4096).unwrap();
    let classical = 1.0 / (2.0 * std::f64::consts::PI.sqrt());
    assert!((fit.fitted - classical).abs() < 1e-3 * classical, "{fit:?}");
    assert!((fit.asserted - (1.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    assert!((fit.asserted / fit.fitted - 2.0).abs() < 1e-2);
    assert!((fit.slope + 1.5).abs() < 1e-2);
}

#[test]
fn leave_zero_law_lazy_total() {
    let spec = IncrementSpec::lazy(ratio(1, 2)).unwrap();
    let law = leave_zero_length_law(&spec, 512).unwrap();
    let total: f64 = law.iter().sum();
    assert!(total < 1.0 && total > 0.9);
    let fit = leave_zero_fit(&spec, 2048).unwrap();
    assert!((fit.slope + 1.5).abs() < 2e-2);
}

#[test]
fn sandwich_small_n() {
    let s = IncrementSpec::simple();
    for n in 1..=10 {
        let sw = disregard_sandwich(&s, n).unwrap();
        assert!(sw.holds(), "n={n}: {sw:?}");
    }
}
