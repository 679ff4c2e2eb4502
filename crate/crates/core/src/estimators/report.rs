use super::fit::{estimate_constant, fit_exponent, ExponentFit};
use super::{mc_persistence, Estimate, ReferenceConstants};
use crate::error::Result;
use crate::exact::{exact_persistence, float_persistence};
use crate::increments::IncrementSpec;
use crate::rational;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub points: Vec<(u64, Estimate)>,
    pub fit: ExponentFit,
    /// `Err` when the fitted slope is inconsistent with the exponent.
    pub constant: Result<Estimate>,
    pub interval: Option<(f64, f64)>,
    /// Whether the constant lies in the interval, widened by 3 standard errors.
    pub verdict: Option<bool>,
    /// False when every point came from the exact programs.
    pub sampled: bool,
}

/// `p_N` over a grid, exactly for lattice laws when `exact` is set and by
/// Monte Carlo otherwise, followed by the exponent fit and the constant.
#[allow(clippy::too_many_arguments)]
pub fn scaling_report(
    spec: &IncrementSpec,
    grid: &[usize],
    exact: bool,
    samples: u64,
    seed: u64,
    shards: usize,
    slope_tolerance: f64,
) -> Result<ScalingReport> {
    let use_exact = exact && spec.is_lattice();
    let points = grid
        .iter()
        .map(|&n| {
            let e = if !use_exact {
                mc_persistence(spec, n, samples, seed, shards)
            } else if spec.is_rational() {
                Estimate::exact(rational::to_f64(&exact_persistence(spec, n)?))
            } else {
                Estimate::exact(float_persistence(spec, n, 1e-300)?.value)
            };
            Ok((n as u64, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_exponent(&points)?;
    let constant = estimate_constant(&points, spec.alpha(), slope_tolerance);
    let interval = ReferenceConstants::for_spec(spec).eqc_interval;
    let verdict = match (&constant, interval) {
        (Ok(c), Some((lo, hi))) => Some(c.value >= lo - 3.0 * c.stderr && c.value <= hi + 3.0 * c.stderr),
        _ => None,
    };
    Ok(ScalingReport { points, fit, constant, interval, verdict, sampled: !use_exact })
}
