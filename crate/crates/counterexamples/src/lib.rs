//! Constructive counterexamples: equilibria whose linearisations forbid a
//! `C¹` inertial manifold, a time-periodic operator whose period map is a
//! weighted shift, and an attractor containing orthogonal segments.

mod c1;
mod floquet;
mod quad;
mod segments;

pub use c1::{c1_obstruction_spectra, linearization, C1Spectra, Eig, Equilibrium};
pub use floquet::{
    build_periodic_operator, chain_log_norm, floquet_pair_data, nonuniform_ratios, poincare_map, superexp_decay,
    DecayRow, DecayTable, NonuniformRatios, OperatorParams, PeriodicOperator, PoincareReport, ShiftCheck,
};
pub use quad::adaptive_simpson;
pub use segments::{segments_attractor, segments_trajectory, smoothness_budget, SegmentsAttractor, SegmentsParams};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CounterexampleError {
    #[error("rotation condition fails on block {block}: gap {gap} >= 2L = {}", 2.0 * l)]
    RotationCondition { block: usize, gap: f64, l: f64 },
    #[error("L = {l} does not exceed the instability threshold {threshold}")]
    BelowThreshold { l: f64, threshold: f64 },
    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },
    #[error("operator norm {norm} exceeds L = {l}")]
    NormBound { norm: f64, l: f64 },
    #[error("integration produced a non-finite state")]
    NonFinite,
    #[error("shift chain leaves the truncation at step {step} (mode {mode})")]
    ChainTruncated { step: usize, mode: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
}

pub type Result<T> = std::result::Result<T, CounterexampleError>;
