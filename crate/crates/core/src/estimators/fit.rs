use super::Estimate;
use crate::error::{Error, Result};
use crate::stats::{t_quantile_975, weighted_line};

/// Log-log fit of `p_N` against `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_ci95: (f64, f64),
    pub r2: f64,
    pub grid: Vec<(u64, f64)>,
}

impl ExponentFit {
    pub fn slope_se(&self) -> f64 {
        (self.slope_ci95.1 - self.slope_ci95.0) / 2.0 / 1.96
    }
}

/// `-(1/2 - 1/(2 alpha))`.
pub fn persistence_exponent(alpha: f64) -> f64 {
    -(0.5 - 0.5 / alpha)
}

/// Weighted least squares of `log p` on `log N` with weights
/// `(p / stderr)^2`. Exact points (zero stderr) are fitted unweighted with a
/// residual-based interval.
pub fn fit_exponent(points: &[(u64, Estimate)]) -> Result<ExponentFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateGrid(format!("{} points, need at least 4", points.len())));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::DegenerateGrid("grid is not strictly increasing".into()));
    }
    if let Some((n, _)) = points.iter().find(|(_, e)| e.value <= 0.0) {
        return Err(Error::DegenerateGrid(format!("estimate at N = {n} is not positive")));
    }
    let x: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|(_, e)| e.value.ln()).collect();
    let sampled = points.iter().all(|(_, e)| e.stderr > 0.0);
    let w: Vec<f64> = if sampled {
        points.iter().map(|(_, e)| (e.value / e.stderr).powi(2)).collect()
    } else {
        vec![1.0; points.len()]
    };
    let line = weighted_line(&x, &y, &w, sampled);
    let q = if sampled { 1.96 } else { t_quantile_975(points.len() - 2) };
    Ok(ExponentFit {
        slope: line.slope,
        intercept: line.intercept,
        slope_ci95: (line.slope - q * line.slope_se, line.slope + q * line.slope_se),
        r2: line.r2,
        grid: points.iter().map(|(n, e)| (*n, e.value)).collect(),
    })
}

/// Weighted mean of `p_N N^(1/2 - 1/(2 alpha))` over the upper half of the
/// grid. The fitted slope interval, widened by `slope_tolerance`, must
/// contain the exponent.
pub fn estimate_constant(points: &[(u64, Estimate)], alpha: f64, slope_tolerance: f64) -> Result<Estimate> {
    let fit = fit_exponent(points)?;
    let target = persistence_exponent(alpha);
    let (lo, hi) = fit.slope_ci95;
    if target < lo - slope_tolerance || target > hi + slope_tolerance {
        return Err(Error::ExponentMismatch { slope: fit.slope, lo, hi, target });
    }
    let upper = &points[points.len() / 2..];
    let scaled: Vec<Estimate> = upper.iter().map(|(n, e)| e.scaled((*n as f64).powf(-target))).collect();
    let samples = scaled.iter().map(|e| e.n_samples).sum();
    if scaled.iter().all(|e| e.stderr > 0.0) {
        let w: Vec<f64> = scaled.iter().map(|e| e.stderr.powi(-2)).collect();
        let sw: f64 = w.iter().sum();
        let v = scaled.iter().zip(&w).map(|(e, w)| e.value * w).sum::<f64>() / sw;
        Ok(Estimate::new(v, sw.sqrt().recip(), samples))
    } else {
        let values: Vec<f64> = scaled.iter().map(|e| e.value).collect();
        let mut e = Estimate::from_values(&values);
        e.n_samples = samples;
        Ok(e)
    }
}

pub const FIT_HEADER: &str = "slope,slope_lo,slope_hi,intercept,r2";

impl ExponentFit {
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.slope, self.slope_ci95.0, self.slope_ci95.1, self.intercept, self.r2)
    }
}
