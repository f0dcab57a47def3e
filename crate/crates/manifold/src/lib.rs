//! Inertial manifold graphs `Φ: P_N H → Q_N H`, built pointwise by shooting
//! (boundary-value problem) or by the Lyapunov–Perron fixed point, plus the
//! cone, squeezing and tracking diagnostics.

pub mod bvp;
pub mod cone;
pub mod graph;
pub mod lp;
pub mod tracking;

pub use bvp::{build_graph_bvp, bvp_at_horizon, BvpOptions, BvpOutcome};
pub use cone::{cone_check, squeezing_check, ConeReport, SqueezingReport, CONE_TOL};
pub use graph::{build_manifold, GridSpec, Interpolation, ManifoldGraph, Method, MethodOptions, PointLog};
pub use lp::{build_graph_lp, LpOptions, LpOutcome};
pub use tracking::{inertial_form, tracking_verify, InertialForm, TrackingReport};

use dynamics::DynamicsError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifoldError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("gap not certified: theta = {theta}, L = {l}")]
    NotCertified { theta: f64, l: f64 },
    #[error("shooting failed at T = {t}: residual {residual:e}")]
    Shooting { t: f64, residual: f64 },
    #[error("T schedule exhausted at T = {t}; last difference {diff:e}")]
    ScheduleExhausted { t: f64, diff: f64 },
    #[error("iteration {iteration} has contraction ratio {ratio} >= 1")]
    NotContracting { iteration: usize, ratio: f64 },
    #[error("no convergence after {iterations} iterations (last difference {diff:e})")]
    NoConvergence { iterations: usize, diff: f64 },
    #[error("point {point:?} lies outside the grid")]
    OutsideHull { point: Vec<f64> },
    #[error("grid point {index} failed: {source}")]
    PointFailed { index: usize, source: Box<ManifoldError> },
    #[error("reduced backward integration failed: {0}; choose a smaller T_fit")]
    BackwardBlowUp(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, ManifoldError>;

pub(crate) fn l2_distance(a: &[Vec<f64>], b: &[Vec<f64>], dt: f64) -> f64 {
    let sq: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum())
        .collect();
    let mut s = 0.0;
    for w in sq.windows(2) {
        s += 0.5 * (w[0] + w[1]) * dt;
    }
    s.sqrt()
}
