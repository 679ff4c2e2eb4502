//! One-dimensional positivity probabilities and the bivariate half-plane
//! inequalities behind the independence of cycle lengths and areas.

mod bivariate;
mod corollary;
mod positivity;

pub use bivariate::{
    halfplane_csv_row, halfplane_measures, BivariateIncrementSpec, Halfplane, HalfplaneRow, HALFPLANE_HEADER,
};
pub use corollary::{corollary_independence_check, CorollaryCheck};
pub use positivity::{
    positivity_probs, positivity_probs_f64, series_diagnostic, sparre_andersen, symmetric_continuous_qn,
    PositivityMode, PositivitySeq, Scalar, CONVOLUTION_BUDGET, POSITIVITY_HEADER, SERIES_HEADER,
};
