//! Dimension estimators, Mané projections and the Romanov spectral check on
//! finite point clouds.

mod cloud;
mod dims;
mod projection;
mod romanov;
mod sets;

pub use cloud::PointCloud;
pub use dims::{
    box_counting_dim, doubling_factor, doubling_factor_at, greedy_net_size, log_doubling_factor, BoxCountReport,
};
pub use projection::{
    injective_fraction, mane_experiment, median_exponent, random_projector, HolderFit, ProjectionExperiment, Projector,
};
pub use romanov::{romanov_check, RomanovReport};
pub use sets::{
    cube_good_ratio, cube_vertices_set, orthogonal_segments_set, segment_cloud, square_cloud, toostr_ratio,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("empty point cloud")]
    Empty,
    #[error("points have different dimensions ({0} vs {1})")]
    Ragged(usize, usize),
    #[error("epsilon range [{lo}, {hi}] must be positive and span at least 1.5 decades")]
    DegenerateRange { lo: f64, hi: f64 },
    #[error("target dimension {n} exceeds ambient {m}")]
    TargetTooLarge { n: usize, m: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ReductionError>;

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, r²)`.
pub(crate) fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return (my, 0.0, 1.0);
    }
    let b = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (my - b * mx, b, r2)
}
