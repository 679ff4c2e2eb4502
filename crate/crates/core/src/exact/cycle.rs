//! Exact law of the first cycle and the leave-zero length law.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::ExactDist;
use crate::error::{Error, Result};
use crate::increments::IncrementSpec;
use crate::rational::{self, Rational};
use crate::walk::CrossingConvention;

/// Sub-probability law of the first cycle restricted to lengths up to the
/// horizon. `first` is the law of `(θ_1, ψ_1)` (for `LastNegative` the cycle
/// is cut at its last negative time and restricted to up-crossings within
/// the horizon), `hat` the law of `(θ̂_1, A_{θ̂_1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleLaw {
    pub convention: CrossingConvention,
    pub horizon: usize,
    pub first: ExactDist,
    pub hat: ExactDist,
    /// Mass of the cycles longer than the horizon.
    pub residual: Rational,
}

/// `(S, A, last negative time, A there)`; time 0 stands for "none".
type State = (i64, i64, i64, i64);

fn crossing(convention: CrossingConvention, s: i64, next: i64) -> bool {
    match convention {
        CrossingConvention::WeakUp | CrossingConvention::LastNegative => s <= 0 && next > 0,
        CrossingConvention::StrictUp => s < 0 && next >= 0,
        CrossingConvention::LeaveZero => s == 0 && next != 0,
    }
}

/// Budget on state transitions for one cycle-law query.
pub const CYCLE_BUDGET: u64 = 100_000_000;

pub fn exact_cycle_law(spec: &IncrementSpec, horizon: usize, convention: CrossingConvention) -> Result<CycleLaw> {
    if !spec.is_lattice() {
        return Err(Error::NotLattice(spec.name()));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    let h = horizon as i64;
    // a walk below -(horizon + 1 - t) at time t cannot close a cycle in time
    let deepest = match spec.min_jump()? {
        Some(lo) => lo,
        None => -(h + 1),
    };
    let law: Vec<(i64, Rational)> = (deepest..=1)
        .map(|x| Ok((x, spec.pmf(x)?)))
        .filter(|r| r.as_ref().map_or(true, |(_, p)| !p.is_zero()))
        .collect::<Result<_>>()?;

    // first step under P(. | S_1 > 0), or P(. | S_1 != 0) when leaving zero
    let admissible = |x: i64| match convention {
        CrossingConvention::LeaveZero => x != 0,
        _ => x > 0,
    };
    let norm = match convention {
        CrossingConvention::LeaveZero => Rational::one() - spec.pmf(0)?,
        _ => Rational::one() - spec.mass_at_most(0)?,
    };
    let mut layer: BTreeMap<State, Rational> = BTreeMap::new();
    for (x, p) in &law {
        if admissible(*x) && x + h >= 0 {
            let st = if *x < 0 { (*x, *x, 1, *x) } else { (*x, *x, 0, 0) };
            *layer.entry(st).or_insert_with(Rational::zero) += p / &norm;
        }
    }

    let mut first = ExactDist::new();
    let mut hat = ExactDist::new();
    let mut transitions = 0u64;
    for t in 1..=h {
        let mut next: BTreeMap<State, Rational> = BTreeMap::new();
        for (&(s, a, ln, ln_a), mass) in &layer {
            for (x, p) in &law {
                let s2 = s + x;
                transitions += 1;
                if transitions > CYCLE_BUDGET {
                    return Err(Error::StateBudgetExceeded { budget: CYCLE_BUDGET, step: t as usize });
                }
                let flow = mass * p;
                if crossing(convention, s, s2) {
                    let (key, hat_key) = match convention {
                        CrossingConvention::LastNegative if ln > 0 => ((ln, ln_a), (ln, ln_a)),
                        _ => ((t, a), (ln, ln_a)),
                    };
                    first.add(key, flow.clone());
                    hat.add(hat_key, flow);
                    continue;
                }
                if t == h || s2 + (h - t) < 0 {
                    continue;
                }
                let a2 = a + s2;
                let st = if s2 < 0 { (s2, a2, t + 1, a2) } else { (s2, a2, ln, ln_a) };
                *next.entry(st).or_insert_with(Rational::zero) += flow;
            }
        }
        layer = next;
    }
    let residual = Rational::one() - first.total();
    Ok(CycleLaw { convention, horizon, first, hat, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryAudit {
    pub max_abs_asymmetry: Rational,
    /// First atom `(t, a)` in key order attaining the maximum.
    pub worst_atom: Option<(i64, i64)>,
}

/// `max |P(t, a) - P(t, -a)|` over the atoms of a law of pairs.
pub fn symmetry_audit(law: &ExactDist) -> SymmetryAudit {
    let mut best = Rational::zero();
    let mut worst = None;
    for (&(t, a), p) in law.atoms() {
        let gap = (p - law.get(&(t, -a))).abs();
        if gap > best {
            best = gap;
            worst = Some((t, a));
        }
    }
    SymmetryAudit { max_abs_asymmetry: best, worst_atom: worst }
}

/// Law of the first leave-zero cycle length `θ*_1` under `P(. | S_1 != 0)`
/// for lengths `1..=horizon`, in floating point. Index `t` holds `P(θ* = t)`.
pub fn leave_zero_length_law(spec: &IncrementSpec, horizon: usize) -> Result<Vec<f64>> {
    if !spec.is_lattice() {
        return Err(Error::NotLattice(spec.name()));
    }
    let h = horizon as i64;
    let deepest = spec.min_jump()?.unwrap_or(-(h + 1)).max(-(h + 1));
    let law: Vec<(i64, f64)> = (deepest..=1)
        .map(|x| Ok((x, spec.pmf_f64(x)?)))
        .filter(|r| r.as_ref().map_or(true, |(_, p)| *p > 0.0))
        .collect::<Result<_>>()?;
    let stay = spec.pmf_f64(0)?;
    // dense layer over S in [-h, h]
    let width = (2 * h + 1) as usize;
    let idx = |s: i64| (s + h) as usize;
    let mut cur = vec![0.0; width];
    for &(x, p) in &law {
        if x != 0 && x >= -h {
            cur[idx(x)] += p / (1.0 - stay);
        }
    }
    let mut out = vec![0.0; horizon + 1];
    for t in 1..=h {
        let zero = cur[idx(0)];
        out[t as usize] = zero * (1.0 - stay);
        if t == h {
            break;
        }
        let mut next = vec![0.0; width];
        let floor = -(h - t);
        for (i, &m) in cur.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let s = i as i64 - h;
            for &(x, p) in &law {
                let s2 = s + x;
                if s == 0 && x != 0 {
                    continue; // the cycle ended at t
                }
                if s2 >= floor && s2 <= h {
                    next[idx(s2)] += m * p;
                }
            }
        }
        cur = next;
    }
    Ok(out)
}

/// Fitted local constant of `P(θ*_1 = h n) ~ c n^(-3/2)` beside the asserted
/// value `sqrt(h / 2π) σ / (P(S_1 != 0) d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeaveZeroFit {
    pub horizon: usize,
    pub subspan: u64,
    /// Mean of `P(θ* = h n) n^(3/2)` over the upper half of the horizon.
    pub fitted: f64,
    pub asserted: f64,
    /// Log-log slope of `P(θ* = h n)` against `n` over the upper 7/8.
    pub slope: f64,
}

pub fn leave_zero_fit(spec: &IncrementSpec, horizon: usize) -> Result<LeaveZeroFit> {
    let info = spec.lattice().ok_or(Error::NotLattice(spec.name()))?;
    let law = leave_zero_length_law(spec, horizon)?;
    let h = info.subspan as usize;
    let sigma = spec.sigma()?;
    let nonzero = 1.0 - spec.pmf_f64(0)?;
    let asserted = (h as f64 / (2.0 * std::f64::consts::PI)).sqrt() * sigma / (nonzero * info.span as f64);
    let points: Vec<(f64, f64)> = (1..=horizon / h).map(|n| (n as f64, law[n * h])).filter(|&(_, p)| p > 0.0).collect();
    let top = horizon / h;
    let upper: Vec<f64> = points.iter().filter(|(n, _)| *n > (top / 2) as f64).map(|(n, p)| p * n.powf(1.5)).collect();
    let fitted = upper.iter().sum::<f64>() / upper.len() as f64;
    let tail: Vec<&(f64, f64)> = points.iter().filter(|(n, _)| *n > (top / 8) as f64).collect();
    let xs: Vec<f64> = tail.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|(_, p)| p.ln()).collect();
    let fit = crate::stats::weighted_line(&xs, &ys, &vec![1.0; xs.len()], false);
    Ok(LeaveZeroFit { horizon, subspan: info.subspan, fitted, asserted, slope: fit.slope })
}

/// CSV rows `convention,horizon,law,theta,psi,num,den` for both laws.
pub fn cycle_law_csv(law: &CycleLaw) -> String {
    let mut out = String::new();
    for (name, dist) in [("first", &law.first), ("hat", &law.hat)] {
        for (&(t, a), p) in dist.atoms() {
            out.push_str(&format!("{},{},{name},{t},{a},{},{}\n", law.convention, law.horizon, p.numer(), p.denom()));
        }
    }
    out.push_str(&format!(
        "{},{},residual,,,{},{}\n",
        law.convention,
        law.horizon,
        law.residual.numer(),
        law.residual.denom()
    ));
    out
}

pub const CYCLE_LAW_HEADER: &str = "convention,horizon,law,theta,psi,num,den";
pub const AUDIT_HEADER: &str =
    "convention,horizon,law,max_abs_asymmetry_num,max_abs_asymmetry_den,worst_theta,worst_psi";

pub fn audit_csv_row(convention: CrossingConvention, horizon: usize, law: &str, audit: &SymmetryAudit) -> String {
    let (t, a) = match audit.worst_atom {
        Some((t, a)) => (t.to_string(), a.to_string()),
        None => (String::new(), String::new()),
    };
    format!(
        "{convention},{horizon},{law},{},{},{t},{a}",
        audit.max_abs_asymmetry.numer(),
        audit.max_abs_asymmetry.denom()
    )
}

/// Formats an audit for humans.
pub fn describe_audit(audit: &SymmetryAudit) -> String {
    match audit.worst_atom {
        Some((t, a)) => format!("{} at ({t}, {a})", rational::format(&audit.max_abs_asymmetry)),
        None => "0".into(),
    }
}
