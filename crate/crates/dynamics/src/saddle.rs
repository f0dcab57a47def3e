//! Bounded solutions of `u' + (A - α)u = h` on a finite window.
//!
//! High modes (`μ = λ - α > 0`) are integrated forward from zero at the left
//! end, low modes backward from zero at the right end. The forcing is taken
//! piecewise linear between nodes and the exponential kernels are integrated
//! exactly on each interval.

use crate::integrator::{phi1, phi2, Trajectory};
use crate::{DynamicsError, Result};
use spectral_core::Spectrum;

/// Half-width `T_w` with `e^{-θ T_w} < tol`.
pub fn saddle_window(theta: f64, tol: f64) -> f64 {
    (1.0 / tol).ln() / theta * (1.0 + 1e-9)
}

#[derive(Debug, Clone)]
pub struct SaddleProblem {
    /// `λ_n - α`
    pub mu: Vec<f64>,
    pub n_low: usize,
    pub theta: f64,
    pub t0: f64,
    pub dt: f64,
    /// `h(t0 + k dt)`; zero outside the grid
    pub forcing: Vec<Vec<f64>>,
}

impl SaddleProblem {
    /// Split at cut `n` with `α = (λ_N + λ_{N+1})/2`.
    pub fn new(spec: &Spectrum, n: usize, t0: f64, dt: f64, forcing: Vec<Vec<f64>>) -> Result<Self> {
        let d = spec.dichotomy(n).map_err(|e| DynamicsError::Invalid(e.to_string()))?;
        if !(d.theta > 0.0) {
            return Err(DynamicsError::NoGap(d.theta));
        }
        let mu = spec.values().iter().map(|l| l - d.alpha).collect();
        Ok(Self { mu, n_low: n, theta: d.theta, t0, dt, forcing })
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.forcing.len()).map(|k| self.t0 + k as f64 * self.dt).collect()
    }
}

/// Precomputed per-mode recursion coefficients for a fixed split and step.
#[derive(Debug, Clone)]
pub struct SaddleSolver {
    n_low: usize,
    decay: Vec<f64>,
    w0: Vec<f64>,
    w1: Vec<f64>,
}

impl SaddleSolver {
    pub fn new(mu: &[f64], n_low: usize, dt: f64) -> Result<Self> {
        if n_low == 0 || n_low >= mu.len() {
            return Err(DynamicsError::Invalid(format!("split {n_low} of {}", mu.len())));
        }
        if !(mu[n_low - 1] < 0.0 && mu[n_low] > 0.0) {
            return Err(DynamicsError::NoGap(0.5 * (mu[n_low] - mu[n_low - 1])));
        }
        let mut s = SaddleSolver { n_low, decay: vec![], w0: vec![], w1: vec![] };
        for (i, &m) in mu.iter().enumerate() {
            if i < n_low {
                // u_k = e^{μh} u_{k+1} - h[φ₂(z) h_k + (φ₁(z) - φ₂(z)) h_{k+1}],  z = μh < 0
                let z = m * dt;
                s.decay.push(z.exp());
                s.w0.push(-dt * phi2(z));
                s.w1.push(-dt * (phi1(z) - phi2(z)));
            } else {
                // u_{k+1} = e^{-μh} u_k + h[(φ₁(z) - φ₂(z)) h_k + φ₂(z) h_{k+1}],  z = -μh
                let z = -m * dt;
                s.decay.push(z.exp());
                s.w0.push(dt * (phi1(z) - phi2(z)));
                s.w1.push(dt * phi2(z));
            }
        }
        Ok(s)
    }

    pub fn solve(&self, h: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let k = h.len();
        let m = self.decay.len();
        let mut u = vec![vec![0.0; m]; k];
        if k == 0 {
            return u;
        }
        for i in self.n_low..m {
            for j in 0..k - 1 {
                u[j + 1][i] = self.decay[i] * u[j][i] + self.w0[i] * h[j][i] + self.w1[i] * h[j + 1][i];
            }
        }
        for i in 0..self.n_low {
            for j in (0..k - 1).rev() {
                u[j][i] = self.decay[i] * u[j + 1][i] + self.w0[i] * h[j][i] + self.w1[i] * h[j + 1][i];
            }
        }
        u
    }
}

pub fn solve_saddle(p: &SaddleProblem) -> Result<Trajectory> {
    if !(p.theta > 0.0) {
        return Err(DynamicsError::NoGap(p.theta));
    }
    if p.forcing.iter().any(|h| h.len() != p.mu.len()) {
        return Err(DynamicsError::Invalid("forcing/mode count mismatch".into()));
    }
    let solver = SaddleSolver::new(&p.mu, p.n_low, p.dt)?;
    Ok(Trajectory { times: p.times(), states: solver.solve(&p.forcing) })
}

/// Trapezoidal `(∫ e^{-2ε|t-τ|} ‖u(t)‖² dt)^{1/2}`.
pub fn weighted_norm(traj: &Trajectory, eps: f64, tau: f64) -> f64 {
    let w: Vec<f64> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, u)| (-2.0 * eps * (t - tau).abs()).exp() * spectral_core::dot(u, u))
        .collect();
    let mut s = 0.0;
    for i in 1..w.len() {
        s += 0.5 * (w[i] + w[i - 1]) * (traj.times[i] - traj.times[i - 1]);
    }
    s.sqrt()
}
