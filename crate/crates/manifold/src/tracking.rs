//! The reduced inertial form and the exponential tracking experiment.

use crate::graph::ManifoldGraph;
use crate::{ManifoldError, Result};
use dynamics::{decay_rate_fit, integrate, Trajectory};
use models::Model;
use serde::{Deserialize, Serialize};
use spectral_core::dist;

/// `u₊ ↦ -Λ₊u₊ + P_N F(u₊ + Φ(u₊))` on the grid box.
pub struct InertialForm<'a> {
    pub model: &'a Model,
    pub graph: &'a ManifoldGraph,
}

pub fn inertial_form<'a>(model: &'a Model, graph: &'a ManifoldGraph) -> Result<InertialForm<'a>> {
    if model.dim() != graph.modes {
        return Err(ManifoldError::Invalid(format!("model has {} modes, graph {}", model.dim(), graph.modes)));
    }
    Ok(InertialForm { model, graph })
}

impl InertialForm<'_> {
    pub fn dim(&self) -> usize {
        self.graph.n
    }

    pub fn field(&self, x: &[f64]) -> Result<Vec<f64>> {
        let u = self.graph.lift(x)?;
        let f = self.model.f.eval(&u);
        let lam = self.model.spectrum.values();
        Ok((0..self.graph.n).map(|i| -lam[i] * x[i] + f[i]).collect())
    }

    /// Classical RK4 over `[0, t_end]` with `steps` steps; `backward` flips time.
    pub fn integrate(&self, x0: &[f64], t_end: f64, steps: usize, backward: bool) -> Result<Trajectory> {
        let h = t_end / steps.max(1) as f64;
        let s = if backward { -1.0 } else { 1.0 };
        let mut x = x0.to_vec();
        let mut times = vec![0.0];
        let mut states = vec![x.clone()];
        let axpy = |x: &[f64], k: &[f64], c: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + c * b).collect() };
        for j in 1..=steps {
            let k1 = self.field(&x)?;
            let k2 = self.field(&axpy(&x, &k1, 0.5 * s * h))?;
            let k3 = self.field(&axpy(&x, &k2, 0.5 * s * h))?;
            let k4 = self.field(&axpy(&x, &k3, s * h))?;
            for i in 0..x.len() {
                x[i] += s * h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            times.push(s * j as f64 * h);
            states.push(x.clone());
        }
        Ok(Trajectory { times, states })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingReport {
    /// fitted `γ` in `‖u(t) - v(t)‖ ≈ C e^{-γt}`
    pub rate: f64,
    pub constant: f64,
    pub quad_coeff: f64,
    pub r2: f64,
    /// `(t, ‖u(t) - v(t)‖)`
    pub distances: Vec<(f64, f64)>,
}

/// Runs `u` forward to `t_fit`, takes the manifold point over `P_N u(t_fit)`,
/// runs it backward with the reduced field and fits the forward decay of the
/// distance on `[skip, t_fit]`.
pub fn tracking_verify(
    model: &Model,
    graph: &ManifoldGraph,
    u0: &[f64],
    t_fit: f64,
    dt: f64,
    skip: f64,
) -> Result<TrackingReport> {
    let form = inertial_form(model, graph)?;
    let full = integrate(model, u0, t_fit, dt)?;
    let steps = full.len() - 1;
    let x_end = full.last()[..graph.n].to_vec();
    let back = form
        .integrate(&x_end, t_fit, steps, true)
        .map_err(|e| ManifoldError::BackwardBlowUp(e.to_string()))?;
    let mut distances = Vec::with_capacity(full.len());
    for (k, t) in full.times.iter().enumerate() {
        let x = &back.states[steps - k];
        let v = graph.lift(x).map_err(|e| ManifoldError::BackwardBlowUp(e.to_string()))?;
        distances.push((*t, dist(&full.states[k], &v)));
    }
    let (ts, ds): (Vec<f64>, Vec<f64>) = distances.iter().filter(|(t, _)| *t >= skip).cloned().unzip();
    let fit = decay_rate_fit(&ts, &ds)?;
    let rate = -fit.exp_rate;
    let d0 = distances[0].1.max(1e-300);
    let constant = distances.iter().map(|(t, d)| d * (rate * t).exp() / d0).fold(0.0, f64::max);
    Ok(TrackingReport { rate, constant, quad_coeff: fit.quad_coeff, r2: fit.r2, distances })
}
