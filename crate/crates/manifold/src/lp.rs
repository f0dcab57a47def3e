//! Lyapunov–Perron iteration in the exponentially weighted trajectory space.
//!
//! With `ũ = e^{αt}u` the equation becomes `ũ' + (A - α)ũ = e^{αt}F(e^{-αt}ũ)`.
//! Writing `ũ = w + v` with `v(t) = e^{(α-λ)t}P u₊` leaves `w` with zero low
//! modes at `t = 0`, which is exactly what the saddle solver returns.

use crate::{l2_distance, ManifoldError, Result};
use dynamics::{saddle_window, SaddleSolver};
use models::Model;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpOptions {
    pub dt: f64,
    /// window half-width from `e^{-θT_w} < window_tol`
    pub window_tol: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self { dt: 2e-3, window_tol: 1e-10, tol: 1e-8, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    /// `Φ(u₊)`, the `Q_N` coefficients
    pub value: Vec<f64>,
    /// `‖w_{k+1} - w_k‖_{L²}` per iteration
    pub diffs: Vec<f64>,
    /// successive ratios of `diffs`
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub window: f64,
}

pub fn build_graph_lp(model: &Model, n: usize, u_plus: &[f64], opts: &LpOptions) -> Result<LpOutcome> {
    let spec = &model.spectrum;
    let d = spec.dichotomy(n).map_err(|e| ManifoldError::Invalid(e.to_string()))?;
    let l = model.lipschitz();
    if !(d.theta > l) {
        return Err(ManifoldError::NotCertified { theta: d.theta, l });
    }
    if u_plus.len() != n {
        return Err(ManifoldError::Invalid(format!("u_plus has {} entries, cut is {n}", u_plus.len())));
    }
    let m = model.dim();
    let lam = spec.values();
    let window = saddle_window(d.theta, opts.window_tol);
    let steps = (window / opts.dt).ceil() as usize;
    let h = window / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|j| -window + j as f64 * h).collect();
    let mu: Vec<f64> = lam.iter().map(|x| x - d.alpha).collect();
    let solver = SaddleSolver::new(&mu, n, h)?;
    let v: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| {
            let mut s = vec![0.0; m];
            for i in 0..n {
                s[i] = ((d.alpha - lam[i]) * t).exp() * u_plus[i];
            }
            s
        })
        .collect();
    let mut w = vec![vec![0.0; m]; times.len()];
    let mut diffs = Vec::new();
    let mut ratios = Vec::new();
    let mut u = vec![0.0; m];
    for it in 1..=opts.max_iter {
        let forcing: Vec<Vec<f64>> = times
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let (grow, shrink) = ((-d.alpha * t).exp(), (d.alpha * t).exp());
                for i in 0..m {
                    u[i] = grow * (w[j][i] + v[j][i]);
                }
                let mut f = model.f.eval(&u);
                f.iter_mut().for_each(|x| *x *= shrink);
                f
            })
            .collect();
        let next = solver.solve(&forcing);
        let diff = l2_distance(&next, &w, h);
        if !diff.is_finite() {
            return Err(ManifoldError::NoConvergence { iterations: it, diff });
        }
        if let Some(&prev) = diffs.last() {
            if prev > 0.0 {
                let r = diff / prev;
                if r >= 1.0 {
                    return Err(ManifoldError::NotContracting { iteration: it, ratio: r });
                }
                ratios.push(r);
            }
        }
        diffs.push(diff);
        w = next;
        if diff < opts.tol {
            let value = w[steps][n..].to_vec();
            return Ok(LpOutcome { value, diffs, ratios, iterations: it, window });
        }
    }
    Err(ManifoldError::NoConvergence { iterations: opts.max_iter, diff: *diffs.last().unwrap_or(&f64::NAN) })
}
