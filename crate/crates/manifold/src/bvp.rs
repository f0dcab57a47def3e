//! Boundary-value construction: `P_N u(0) = u₊`, `Q_N u(-T) = 0`, `T → ∞`.
//!
//! The unknown is `q` with `P_N u(-T) = e^{ΛT} q`, so that the shooting map
//! `q ↦ P_N u(0)` is close to the identity for the linear part.

use crate::{ManifoldError, Result};
use dynamics::integrate_every;
use models::Model;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use spectral_core::{dist, norm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvpOptions {
    /// first horizon; later ones double
    pub t0: f64,
    /// stop doubling once `T·θ` exceeds this
    pub max_t_theta: f64,
    pub dt: f64,
    /// accepted difference between successive horizons
    pub tol: f64,
    /// shooting residual, relative to `1 + ‖u₊‖`
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for BvpOptions {
    fn default() -> Self {
        Self { t0: 0.5, max_t_theta: 40.0, dt: 2e-3, tol: 1e-9, newton_tol: 1e-12, max_newton: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvpOutcome {
    pub value: Vec<f64>,
    /// `(T, ‖Φ_T - Φ_{T/2}‖)`, the first entry has difference `NaN`
    pub schedule: Vec<(f64, f64)>,
    pub residual: f64,
    pub newton_iterations: usize,
}

struct Shooter<'a> {
    model: &'a Model,
    n: usize,
    t: f64,
    dt: f64,
}

impl Shooter<'_> {
    fn state(&self, q: &[f64]) -> Result<Vec<f64>> {
        let lam = self.model.spectrum.values();
        let mut u = vec![0.0; self.model.dim()];
        for i in 0..self.n {
            u[i] = (lam[i] * self.t).exp() * q[i];
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(ManifoldError::Shooting { t: self.t, residual: f64::INFINITY });
        }
        let tr = integrate_every(self.model, &u, self.t, self.dt, usize::MAX)?;
        Ok(tr.last().to_vec())
    }

    fn residual(&self, q: &[f64], target: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let end = self.state(q)?;
        let r = end[..self.n].iter().zip(target).map(|(a, b)| a - b).collect();
        Ok((r, end))
    }

    fn jacobian(&self, q: &[f64], r0: &[f64], target: &[f64], scale: f64) -> Result<DMatrix<f64>> {
        let n = self.n;
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            // rescale the step once so that it moves the residual by ~1e-7·scale
            let mut h = 1e-7 * q[j].abs().max(1e-10 * (norm(q) + 1e-10));
            let mut col = vec![0.0; n];
            for _ in 0..2 {
                let mut qh = q.to_vec();
                qh[j] += h;
                let (r, _) = self.residual(&qh, target)?;
                for i in 0..n {
                    col[i] = (r[i] - r0[i]) / h;
                }
                let c = norm(&col);
                if c == 0.0 {
                    break;
                }
                let want = 1e-7 * scale / c;
                if (want / h - 1.0).abs() < 0.5 {
                    break;
                }
                h = want;
            }
            for i in 0..n {
                jac[(i, j)] = col[i];
            }
        }
        Ok(jac)
    }

    /// Damped Newton for `P_N u(0) = target`; returns `(Q_N u(0), residual, iterations, q)`.
    fn solve(&self, target: &[f64], q0: Vec<f64>, opts: &BvpOptions) -> Result<(Vec<f64>, f64, usize, Vec<f64>)> {
        let scale = 1.0 + norm(target);
        let mut q = q0;
        let (mut r, mut end) = self.residual(&q, target)?;
        let mut rn = norm(&r);
        for it in 0..=opts.max_newton {
            if rn <= opts.newton_tol * scale {
                return Ok((end[self.n..].to_vec(), rn, it, q));
            }
            if it == opts.max_newton {
                break;
            }
            let jac = self.jacobian(&q, &r, target, scale)?;
            let step = jac
                .lu()
                .solve(&DVector::from_column_slice(&r))
                .ok_or(ManifoldError::Shooting { t: self.t, residual: rn })?;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<f64> = q.iter().zip(step.iter()).map(|(a, s)| a - lambda * s).collect();
                if let Ok((rt, et)) = self.residual(&trial, target) {
                    let n2 = norm(&rt);
                    if n2 < rn {
                        q = trial;
                        r = rt;
                        end = et;
                        rn = n2;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Err(ManifoldError::Shooting { t: self.t, residual: rn })
    }
}

/// `Q_N u(0)` for one fixed horizon `T`, with the shooting residual.
pub fn bvp_at_horizon(model: &Model, n: usize, u_plus: &[f64], t: f64, opts: &BvpOptions) -> Result<(Vec<f64>, f64)> {
    if u_plus.len() != n || n == 0 || n >= model.dim() {
        return Err(ManifoldError::Invalid(format!("u_plus has {} entries, cut is {n}", u_plus.len())));
    }
    let sh = Shooter { model, n, t, dt: opts.dt };
    let (value, residual, _, _) = sh.solve(u_plus, u_plus.to_vec(), opts)?;
    Ok((value, residual))
}

pub fn build_graph_bvp(model: &Model, n: usize, u_plus: &[f64], opts: &BvpOptions) -> Result<BvpOutcome> {
    let d = model.spectrum.dichotomy(n).map_err(|e| ManifoldError::Invalid(e.to_string()))?;
    if u_plus.len() != n {
        return Err(ManifoldError::Invalid(format!("u_plus has {} entries, cut is {n}", u_plus.len())));
    }
    let mut t = opts.t0;
    let mut schedule = Vec::new();
    let mut prev: Option<Vec<f64>> = None;
    let mut total_newton = 0;
    loop {
        let sh = Shooter { model, n, t, dt: opts.dt };
        let (value, residual, its, _) = sh.solve(u_plus, u_plus.to_vec(), opts)?;
        total_newton += its;
        let diff = prev.as_ref().map_or(f64::NAN, |p| dist(p, &value));
        schedule.push((t, diff));
        if diff < opts.tol {
            return Ok(BvpOutcome { value, schedule, residual, newton_iterations: total_newton });
        }
        if t * d.theta > opts.max_t_theta {
            return Err(ManifoldError::ScheduleExhausted { t, diff });
        }
        prev = Some(value);
        t *= 2.0;
    }
}
