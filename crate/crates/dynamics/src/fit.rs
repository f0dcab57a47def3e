//! Least-squares fits of norm series.

use crate::{DynamicsError, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Relative floor below which norms are treated as round-off.
pub const NORM_FLOOR: f64 = 1e-14;

/// `log‖v(t)‖ ≈ c + exp_rate·t + quad_coeff·t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub intercept: f64,
    pub exp_rate: f64,
    pub quad_coeff: f64,
    pub r2: f64,
    /// points below the floor, excluded from the fit
    pub floored: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

fn lstsq(cols: usize, xs: &[f64], ys: &[f64]) -> (Vec<f64>, f64) {
    let n = xs.len();
    let a = DMatrix::from_fn(n, cols, |i, j| xs[i].powi(j as i32));
    let b = DVector::from_column_slice(ys);
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).expect("svd solve");
    let pred = &a * &coef;
    let mean = ys.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = ys.iter().zip(pred.iter()).map(|(y, p)| (y - p).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (coef.iter().copied().collect(), r2)
}

/// Ordinary least squares `y ≈ a + b x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(DynamicsError::TooFewPoints { need: 2, have: xs.len().min(ys.len()) });
    }
    let (c, r2) = lstsq(2, xs, ys);
    Ok(LineFit { intercept: c[0], slope: c[1], r2 })
}

/// Quadratic fit of `log‖v‖` against `t`. Norms below `1e-14` of the first
/// value are dropped and counted in `floored`.
pub fn decay_rate_fit(times: &[f64], norms: &[f64]) -> Result<DecayFit> {
    if times.len() != norms.len() || norms.is_empty() {
        return Err(DynamicsError::Invalid("times/norms length mismatch".into()));
    }
    let floor = norms[0].abs() * NORM_FLOOR;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut floored = 0;
    for (&t, &v) in times.iter().zip(norms) {
        if v > floor && v > 0.0 && v.is_finite() {
            xs.push(t);
            ys.push(v.ln());
        } else {
            floored += 1;
        }
    }
    if xs.len() < 3 {
        return Err(DynamicsError::TooFewPoints { need: 3, have: xs.len() });
    }
    let (c, r2) = lstsq(3, &xs, &ys);
    Ok(DecayFit { intercept: c[0], exp_rate: c[1], quad_coeff: c[2], r2, floored })
}

/// Same quadratic model fitted to `log‖v‖` directly, for series that
/// leave the floating-point range.
pub fn decay_rate_fit_log(times: &[f64], log_norms: &[f64]) -> Result<DecayFit> {
    if times.len() != log_norms.len() {
        return Err(DynamicsError::Invalid("times/norms length mismatch".into()));
    }
    if times.len() < 3 {
        return Err(DynamicsError::TooFewPoints { need: 3, have: times.len() });
    }
    let (c, r2) = lstsq(3, times, log_norms);
    Ok(DecayFit { intercept: c[0], exp_rate: c[1], quad_coeff: c[2], r2, floored: 0 })
}
