//! Dissipativity fits, attractor sampling and log-convexity diagnostics.

use crate::fit::linear_fit;
use crate::integrator::{integrate_every, Trajectory};
use crate::{DynamicsError, Result};
use models::Model;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral_core::{dist, norm, sobolev_norm, Spectrum};

/// Fitted constants of `‖u(t)‖² ≤ C e^{-αt}‖u(0)‖² + C_*` and of the `H²` analogue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipativityReport {
    pub c: f64,
    pub alpha: f64,
    pub c_star: f64,
    pub c_h2: f64,
    pub alpha_h2: f64,
    pub c_star_h2: f64,
    /// largest `‖u(t)‖` seen on any trajectory
    pub max_norm: f64,
}

fn envelope_fit(times: &[f64], series: &[Vec<f64>]) -> (f64, f64, f64) {
    let t_end = *times.last().unwrap();
    let c_star = series
        .iter()
        .flat_map(|y| y.iter().zip(times).filter(|(_, t)| **t >= 0.5 * t_end).map(|(v, _)| *v))
        .fold(0.0, f64::max);
    let env: Vec<f64> = (0..times.len())
        .map(|k| {
            series
                .iter()
                .filter(|y| y[0] > 0.0)
                .map(|y| (y[k] - c_star).max(0.0) / y[0])
                .fold(0.0, f64::max)
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&env)
        .filter(|(_, e)| **e > 1e-8)
        .map(|(t, e)| (*t, e.ln()))
        .unzip();
    let alpha = match linear_fit(&xs, &ys) {
        Ok(f) => (-f.slope).max(0.0),
        Err(_) => 0.0,
    };
    let c = times
        .iter()
        .zip(&env)
        .map(|(t, e)| e * (alpha * t).exp())
        .fold(0.0, f64::max)
        .max(1e-300);
    (c, alpha, c_star)
}

/// Integrates every start over `[0, horizon]` and fits the dissipativity constants.
pub fn dissipativity_probe(model: &Model, starts: &[Vec<f64>], horizon: f64, dt: f64) -> Result<DissipativityReport> {
    if starts.is_empty() {
        return Err(DynamicsError::Invalid("no starting states".into()));
    }
    let every = ((horizon / dt) / 400.0).ceil().max(1.0) as usize;
    let trajs: Vec<Trajectory> = starts
        .par_iter()
        .map(|u0| integrate_every(model, u0, horizon, dt, every))
        .collect::<Result<_>>()?;
    let times = trajs[0].times.clone();
    let spec = &model.spectrum;
    let h: Vec<Vec<f64>> = trajs.iter().map(|t| t.states.iter().map(|u| norm(u).powi(2)).collect()).collect();
    let h2: Vec<Vec<f64>> = trajs
        .iter()
        .map(|t| t.states.iter().map(|u| sobolev_norm(spec, u, 2.0).powi(2)).collect())
        .collect();
    let (c, alpha, c_star) = envelope_fit(&times, &h);
    let (c_h2, alpha_h2, c_star_h2) = envelope_fit(&times, &h2);
    let max_norm = h.iter().flatten().fold(0.0f64, |a, b| a.max(b.sqrt()));
    Ok(DissipativityReport { c, alpha, c_star, c_h2, alpha_h2, c_star_h2, max_norm })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub n_traj: usize,
    pub burn_in: f64,
    pub keep: usize,
    /// time between kept snapshots
    pub spacing: f64,
    pub dt: f64,
    /// radius of the ball the starts are drawn from
    pub radius: f64,
}

/// Uniform random point in the ball of radius `r` in `ℝ^m`.
pub fn random_in_ball(rng: &mut ChaCha8Rng, m: usize, r: f64) -> Vec<f64> {
    let g: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
    let n = norm(&g).max(1e-300);
    let u: f64 = Uniform::new(0.0f64, 1.0).unwrap().sample(rng);
    let s = r * u.powf(1.0 / m as f64) / n;
    g.iter().map(|x| x * s).collect()
}

/// Snapshots of trajectories after a burn-in; deterministic in `seed`.
pub fn attractor_sample(model: &Model, spec: &SampleSpec, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> = (0..spec.n_traj).map(|_| random_in_ball(&mut rng, model.dim(), spec.radius)).collect();
    let every = ((spec.spacing / spec.dt).round() as usize).max(1);
    let horizon = spec.burn_in + spec.spacing * spec.keep.saturating_sub(1) as f64;
    let out: Vec<Vec<Vec<f64>>> = starts
        .par_iter()
        .map(|u0| {
            let burn = integrate_every(model, u0, spec.burn_in, spec.dt, usize::MAX)?;
            let tail = integrate_every(model, burn.last(), horizon - spec.burn_in, spec.dt, every)?;
            let pts: Vec<Vec<f64>> = tail.states.into_iter().take(spec.keep).collect();
            if pts.iter().any(|p| norm(p) > 10.0 * spec.radius.max(1.0)) {
                return Err(DynamicsError::NotDissipative("trajectory left 10x the start ball".into()));
            }
            Ok(pts)
        })
        .map(|r| r.map_err(|e| match e {
            DynamicsError::NonFinite { .. } => DynamicsError::NotDissipative(e.to_string()),
            other => other,
        }))
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogConvexityReport {
    /// `min (log RHS - log LHS)` over interior nodes
    pub min_slack: f64,
    /// distance from the end time where the minimum occurs
    pub worst_t: f64,
    pub checked: usize,
    /// `v ≡ 0`
    pub degenerate: bool,
}

/// Checks `‖v(-t)‖ ≤ e^{2Lt + L²t(T-t)/4} ‖v(-T)‖^{t/T} ‖v(0)‖^{(T-t)/T}` for
/// `v = u₁ - u₂`, the time axis shifted so that the last node is `0`.
pub fn log_convexity_check(a: &Trajectory, b: &Trajectory, l: f64) -> LogConvexityReport {
    let v = a.minus(b);
    let n: Vec<f64> = v.norms();
    let k = n.len();
    let t_end = *v.times.last().unwrap();
    let tt = t_end - v.times[0];
    if n.iter().all(|x| *x == 0.0) {
        return LogConvexityReport { min_slack: 0.0, worst_t: 0.0, checked: k, degenerate: true };
    }
    let (l0, lt) = (n[k - 1].ln(), n[0].ln());
    let mut min_slack = f64::INFINITY;
    let mut worst_t = 0.0;
    for j in 1..k - 1 {
        let t = t_end - v.times[j];
        let rhs = 2.0 * l * t + l * l * t * (tt - t) / 4.0 + (t / tt) * lt + ((tt - t) / tt) * l0;
        let slack = rhs - n[j].ln();
        if slack < min_slack {
            min_slack = slack;
            worst_t = t;
        }
    }
    LogConvexityReport { min_slack, worst_t, checked: k.saturating_sub(2), degenerate: false }
}

/// `(‖x-y‖_H, ‖x-y‖_{H²} / (‖x-y‖_H log^{1/2}(2K/‖x-y‖_H)))` for all pairs,
/// with `K = 2 max ‖u‖` over the cloud.
pub fn almost_equivalence_ratios(spec: &Spectrum, cloud: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let k = 2.0 * cloud.iter().map(|u| norm(u)).fold(0.0, f64::max);
    let mut out = Vec::new();
    for i in 0..cloud.len() {
        for j in i + 1..cloud.len() {
            let d = dist(&cloud[i], &cloud[j]);
            if d == 0.0 {
                continue;
            }
            let diff: Vec<f64> = cloud[i].iter().zip(&cloud[j]).map(|(a, b)| a - b).collect();
            let h2 = sobolev_norm(spec, &diff, 2.0);
            out.push((d, h2 / (d * (2.0 * k / d).ln().sqrt())));
        }
    }
    out
}
