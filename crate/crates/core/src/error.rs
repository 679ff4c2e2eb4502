use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("increment law is not centered (mean = {mean})")]
    NonCentered { mean: String },

    #[error("probability masses sum to {total}, expected 1")]
    MassDeficit { total: String },

    #[error("negative probability {value} at {at}")]
    NegativeProbability { at: String, value: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} increments are not lattice-valued")]
    NotLattice(&'static str),

    #[error("{0} increments do not have rational probabilities")]
    NotRational(&'static str),

    #[error("variance is undefined for alpha = {alpha}")]
    VarianceUndefined { alpha: f64 },

    #[error("state budget of {budget} transitions exceeded at step {step}")]
    StateBudgetExceeded { budget: u64, step: usize },

    #[error("P(S_{n} = 0) = 0, so {n} is outside the bridge set")]
    NotInBridgeSet { n: usize },

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("fitted slope {slope:.4} (95% CI [{lo:.4}, {hi:.4}]) is inconsistent with {target:.4}")]
    ExponentMismatch { slope: f64, lo: f64, hi: f64, target: f64 },

    #[error("no reference law: {0}")]
    NoReferenceLaw(String),

    #[error("parse error: {0}")]
    Parse(String),
}
