//! Discrete checks of the cone inequality, cone invariance and squeezing.

use crate::{ManifoldError, Result};
use dynamics::{linear_fit, Trajectory};
use models::Model;
use serde::{Deserialize, Serialize};
use spectral_core::{cone_value, dot, norm};

/// Allowed negative slack of the discrete cone inequality, per unit of `∫‖v‖²`.
pub const CONE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub pairs: usize,
    pub alpha: f64,
    pub mu: f64,
    /// smallest normalised slack of `e^{2αh}V_{k+1} - V_k ≤ -2μ∫e^{2α(s-t_k)}‖v‖²`
    pub worst_slack: f64,
    pub inequality_violations: usize,
    /// pairs starting in `K⁺` whose difference leaves it
    pub invariance_violations: usize,
    pub violating_pairs: usize,
    /// `(pair, time)` of the first violation found
    pub first_violation: Option<(usize, f64)>,
}

fn check_pair(a: &Trajectory, b: &Trajectory, n: usize, alpha: f64, mu: f64) -> (f64, Option<f64>, Option<f64>) {
    let v = a.minus(b);
    let vals: Vec<f64> = v.states.iter().map(|s| cone_value(s, n)).collect();
    let sq: Vec<f64> = v.states.iter().map(|s| dot(s, s)).collect();
    let mut worst = f64::INFINITY;
    let mut ineq = None;
    for k in 0..v.len().saturating_sub(1) {
        let h = v.times[k + 1] - v.times[k];
        let g = (2.0 * alpha * h).exp();
        let integral = 0.5 * h * (sq[k] + g * sq[k + 1]);
        if integral == 0.0 {
            continue;
        }
        let slack = (-2.0 * mu * integral - (g * vals[k + 1] - vals[k])) / integral;
        if slack < worst {
            worst = slack;
        }
        if slack < -CONE_TOL && ineq.is_none() {
            ineq = Some(v.times[k]);
        }
    }
    let mut inv = None;
    if sq[0] > 0.0 && vals[0] <= 0.0 {
        inv = (0..v.len()).find(|&k| vals[k] > 1e-9 * sq[k]).map(|k| v.times[k]);
    }
    (worst, ineq, inv)
}

/// `α = (λ_N + λ_{N+1})/2`, `μ = (λ_{N+1} - λ_N)/2 - L`; violations are data.
pub fn cone_check(model: &Model, pairs: &[(Trajectory, Trajectory)], n: usize) -> Result<ConeReport> {
    let d = model.spectrum.dichotomy(n).map_err(|e| ManifoldError::Invalid(e.to_string()))?;
    let mu = d.theta - model.lipschitz();
    let mut rep = ConeReport {
        pairs: pairs.len(),
        alpha: d.alpha,
        mu,
        worst_slack: f64::INFINITY,
        inequality_violations: 0,
        invariance_violations: 0,
        violating_pairs: 0,
        first_violation: None,
    };
    for (i, (a, b)) in pairs.iter().enumerate() {
        if a.times != b.times {
            return Err(ManifoldError::Invalid(format!("pair {i} is not on a common grid")));
        }
        let (w, ineq, inv) = check_pair(a, b, n, d.alpha, mu);
        rep.worst_slack = rep.worst_slack.min(w);
        rep.inequality_violations += ineq.is_some() as usize;
        rep.invariance_violations += inv.is_some() as usize;
        if ineq.is_some() || inv.is_some() {
            rep.violating_pairs += 1;
            if rep.first_violation.is_none() {
                let t = match (ineq, inv) {
                    (Some(x), Some(y)) => x.min(y),
                    (Some(x), None) | (None, Some(x)) => x,
                    _ => unreachable!(),
                };
                rep.first_violation = Some((i, t));
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    /// pairs with `V(v(T)) > 0`
    pub considered: usize,
    /// pairs ending inside `K⁺`
    pub excluded: usize,
    /// smallest fitted rate in `‖v(t)‖ ≤ C e^{-γt}‖v(0)‖`
    pub gamma_min: f64,
    /// `gamma_min - α`, the rate in the `e^{αt}`-weighted frame
    pub gamma_excess: f64,
    pub c_max: f64,
    pub meets_target: bool,
}

pub fn squeezing_check(model: &Model, pairs: &[(Trajectory, Trajectory)], n: usize, gamma_target: f64) -> Result<SqueezingReport> {
    let d = model.spectrum.dichotomy(n).map_err(|e| ManifoldError::Invalid(e.to_string()))?;
    let mut considered = 0;
    let mut excluded = 0;
    let mut gamma_min = f64::INFINITY;
    let mut c_max = 0.0f64;
    for (a, b) in pairs {
        let v = a.minus(b);
        let n0 = norm(&v.states[0]);
        if n0 == 0.0 || cone_value(v.last(), n) <= 0.0 {
            excluded += 1;
            continue;
        }
        considered += 1;
        let (ts, ls): (Vec<f64>, Vec<f64>) = v
            .times
            .iter()
            .zip(&v.states)
            .map(|(t, s)| (*t - v.times[0], norm(s)))
            .filter(|(_, x)| *x > 0.0)
            .map(|(t, x)| (t, (x / n0).ln()))
            .unzip();
        let fit = linear_fit(&ts, &ls)?;
        let g = -fit.slope;
        gamma_min = gamma_min.min(g);
        let c = ts.iter().zip(&ls).map(|(t, l)| (l + g * t).exp()).fold(0.0, f64::max);
        c_max = c_max.max(c);
    }
    Ok(SqueezingReport {
        considered,
        excluded,
        gamma_min,
        gamma_excess: gamma_min - d.alpha,
        c_max,
        meets_target: considered > 0 && gamma_min >= gamma_target,
    })
}
