use crate::{line_fit, PointCloud, ReductionError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral_core::dist;

/// First-fit ε-net: a point opens a new center unless one lies within `eps`.
pub fn greedy_net_size(points: &[&[f64]], eps: f64) -> usize {
    let mut centers: Vec<&[f64]> = Vec::new();
    let e2 = eps * eps;
    for p in points {
        let covered = centers
            .iter()
            .any(|c| c.iter().zip(p.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= e2);
        if !covered {
            centers.push(p);
        }
    }
    centers.len()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountReport {
    pub dim: f64,
    pub r2: f64,
    /// `(ε, N_ε)`
    pub counts: Vec<(f64, usize)>,
}

/// Slope of `log N_ε` against `log(1/ε)` over `n_eps` log-spaced radii.
pub fn box_counting_dim(cloud: &PointCloud, eps_lo: f64, eps_hi: f64, n_eps: usize) -> Result<BoxCountReport> {
    if !(eps_lo > 0.0) || !(eps_hi / eps_lo >= 10f64.powf(1.5) * (1.0 - 1e-12)) || n_eps < 2 {
        return Err(ReductionError::DegenerateRange { lo: eps_lo, hi: eps_hi });
    }
    let pts: Vec<&[f64]> = cloud.points().iter().map(|p| p.as_slice()).collect();
    let ratio = (eps_hi / eps_lo).ln();
    let eps: Vec<f64> = (0..n_eps).map(|k| eps_lo * (ratio * k as f64 / (n_eps - 1) as f64).exp()).collect();
    let counts: Vec<(f64, usize)> = eps.par_iter().map(|&e| (e, greedy_net_size(&pts, e))).collect();
    let x: Vec<f64> = counts.iter().map(|c| -c.0.ln()).collect();
    let y: Vec<f64> = counts.iter().map(|c| (c.1 as f64).ln()).collect();
    let (_, dim, r2) = line_fit(&x, &y);
    Ok(BoxCountReport { dim, r2, counts })
}

/// `N_{ε/2}(K ∩ B(radius, x))` at one center.
pub fn doubling_factor_at(cloud: &PointCloud, center: usize, radius: f64, eps: f64) -> usize {
    let c = &cloud.points()[center];
    let lim = radius * (1.0 + 1e-12);
    let ball: Vec<&[f64]> = cloud.points().iter().filter(|p| dist(p, c) <= lim).map(|p| p.as_slice()).collect();
    greedy_net_size(&ball, 0.5 * eps)
}

/// `D_ε = max_x N_{ε/2}(K ∩ B(ε, x))` over all centers of the cloud.
pub fn doubling_factor(cloud: &PointCloud, eps: f64) -> usize {
    (0..cloud.len()).into_par_iter().map(|i| doubling_factor_at(cloud, i, eps, eps)).max().unwrap_or(0)
}

/// `max log D_ε / log log(1/ε)` over the radii with `ε < 1/e`.
pub fn log_doubling_factor(cloud: &PointCloud, eps: &[f64]) -> f64 {
    eps.iter()
        .filter(|&&e| e > 0.0 && e < (-1.0f64).exp())
        .map(|&e| (doubling_factor(cloud, e) as f64).ln() / (1.0 / e).ln().ln())
        .fold(0.0, f64::max)
}
