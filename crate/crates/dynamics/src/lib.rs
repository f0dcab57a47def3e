//! Time integration, the linear saddle solver and trajectory diagnostics.

pub mod fit;
pub mod integrator;
pub mod probes;
pub mod saddle;

pub use fit::{decay_rate_fit, decay_rate_fit_log, linear_fit, DecayFit, LineFit};
pub use integrator::{etd2_step, integrate, integrate_diag, integrate_every, phi1, phi2, Trajectory};
pub use probes::{
    almost_equivalence_ratios, attractor_sample, dissipativity_probe, log_convexity_check,
    random_in_ball, DissipativityReport, LogConvexityReport, SampleSpec,
};
pub use saddle::{saddle_window, solve_saddle, weighted_norm, SaddleProblem, SaddleSolver};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("non-finite state at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
    #[error("step dt = {dt} exceeds the budget dt*L <= 0.5 (L = {l})")]
    StepBudget { dt: f64, l: f64 },
    #[error("no spectral gap at the cut: theta = {0}")]
    NoGap(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("model is not dissipative at this truncation: {0}")]
    NotDissipative(String),
    #[error("fewer than {need} usable points in the series ({have} above the floor)")]
    TooFewPoints { need: usize, have: usize },
}

pub type Result<T> = std::result::Result<T, DynamicsError>;
