//! Monte Carlo study of pure-state conversion under incoherent operations.
//!
//! A pure state enters only through its diagonal `δ(ψ)`, a point of the unit
//! simplex. For Haar-random states that point is flat on the simplex, so the
//! library samples it directly and works with:
//!
//! * [`majorization`]: the relation `x ≺ y`, the conversion probability
//!   `Π(x, y)`, the bridge walk `S_k` and its occupation time, and the
//!   limiting functional `Π∞` on Poisson processes;
//! * [`random_states`]: reproducible flat and Dirichlet samplers;
//! * [`order_stats`]: exact order-statistics densities and kernels, plus the
//!   V/W chains describing the extreme components for large `n`;
//! * [`stats`]: estimates with standard errors, empirical CDFs,
//!   Kolmogorov-Smirnov distances and power-law fits;
//! * [`experiments`]: the chunked, thread-count independent Monte Carlo runs.

pub mod error;
pub mod experiments;
pub mod majorization;
pub mod order_stats;
pub mod random_states;
pub mod stats;

pub use error::{Error, Result};
pub use majorization::{
    bridge_walk, conversion_probability, majorizes, pi_infinity, sort_desc, time_above_origin,
    BridgeWalk, ProbVector, SortedProbVector,
};
pub use random_states::{DirichletParam, RngStream, SimplexSampler};
pub use stats::{EmpiricalCdf, EstimateWithError, PowerLawFit};
