//! Persistence probabilities of integrated random walks.
//!
//! For a centered random walk `S_n` with integrated sums `A_n = S_1 + ... + S_n`
//! this crate computes
//!
//! * `p_N = P(A_1 > 0, ..., A_N > 0)` and the bridge version
//!   `p*_N = P(A_1 > 0, ..., A_N > 0 | S_N = 0)` exactly for lattice walks
//!   ([`exact`]),
//! * the one-dimensional positivity probabilities `q_N` through the
//!   Sparre-Andersen recursion and bivariate half-plane measures
//!   ([`fluctuation`]),
//! * Monte Carlo estimates of `p_N`, cycle tails, renewal counts and the
//!   cycle identities used to derive the `N^(1/(2a) - 1/2)` rate
//!   ([`estimators`]).
//!
//! Increment laws live in [`increments`]; trajectories and their
//! decomposition into cycles between up-crossings of zero live in [`walk`].

pub mod error;
pub mod estimators;
pub mod exact;
pub mod fluctuation;
pub mod increments;
pub mod kv;
pub mod parallel;
pub mod rational;
pub mod rng;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use estimators::{Estimate, ExponentFit, ReferenceConstants};
pub use exact::{ExactDist, StateLayer};
pub use fluctuation::{BivariateIncrementSpec, PositivitySeq};
pub use increments::{Family, IncrementSpec, Moments, ValidationReport};
pub use rational::Rational;
pub use rng::RandomStream;
pub use walk::{CrossingConvention, CycleRecord, Trajectory};

/// Library version recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
