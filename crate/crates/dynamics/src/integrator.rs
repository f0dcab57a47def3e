//! Second-order exponential Runge–Kutta for `u' + Λu = F(u)` with diagonal `Λ`.
//!
//! `U₂ = e^{-hΛ/2}u + (h/2)φ₁(-hΛ/2)F(u)`,
//! `u₊ = e^{-hΛ}u + h[(φ₁ - 2φ₂)(-hΛ)F(u) + 2φ₂(-hΛ)F(U₂)]`.
//! The linear part is exact.

use crate::{DynamicsError, Result};
use models::Model;
use serde::{Deserialize, Serialize};

const SERIES_CUTOFF: f64 = 0.1;

/// `φ₁(z) = (e^z - 1)/z`.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < SERIES_CUTOFF {
        // 1 + z/2 + z²/6 + ...
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 2..16 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        z.exp_m1() / z
    }
}

/// `φ₂(z) = (e^z - 1 - z)/z²`.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < SERIES_CUTOFF {
        let mut term = 0.5;
        let mut sum = 0.5;
        for k in 3..17 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("empty trajectory")
    }

    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(|s| spectral_core::norm(s)).collect()
    }

    /// Pointwise difference with another trajectory on the same grid.
    pub fn minus(&self, other: &Trajectory) -> Trajectory {
        let states = self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Trajectory { times: self.times.clone(), states }
    }
}

struct StepTables {
    e: Vec<f64>,
    e_half: Vec<f64>,
    p_half: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl StepTables {
    fn new(lam: &[f64], h: f64) -> Self {
        let mut t = StepTables {
            e: Vec::with_capacity(lam.len()),
            e_half: Vec::with_capacity(lam.len()),
            p_half: Vec::with_capacity(lam.len()),
            a: Vec::with_capacity(lam.len()),
            b: Vec::with_capacity(lam.len()),
        };
        for &l in lam {
            let z = -h * l;
            t.e.push(z.exp());
            t.e_half.push((0.5 * z).exp());
            t.p_half.push(0.5 * h * phi1(0.5 * z));
            t.a.push(h * (phi1(z) - 2.0 * phi2(z)));
            t.b.push(2.0 * h * phi2(z));
        }
        t
    }

    fn step<F: FnMut(&[f64]) -> Vec<f64>>(&self, f: &mut F, u: &[f64]) -> Vec<f64> {
        let fu = f(u);
        let mid: Vec<f64> = (0..u.len()).map(|i| self.e_half[i] * u[i] + self.p_half[i] * fu[i]).collect();
        let fm = f(&mid);
        (0..u.len()).map(|i| self.e[i] * u[i] + self.a[i] * fu[i] + self.b[i] * fm[i]).collect()
    }
}

/// One step of size `h`; `lam` may contain negative entries (backward runs).
pub fn etd2_step<F: FnMut(&[f64]) -> Vec<f64>>(lam: &[f64], f: &mut F, u: &[f64], h: f64) -> Vec<f64> {
    StepTables::new(lam, h).step(f, u)
}

/// Integrates over `[0, t_end]` with uniform steps no larger than `dt`,
/// saving every `save_every`-th state (the last one is always saved).
pub fn integrate_diag<F: FnMut(&[f64]) -> Vec<f64>>(
    lam: &[f64],
    mut f: F,
    u0: &[f64],
    t_end: f64,
    dt: f64,
    save_every: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) || save_every == 0 {
        return Err(DynamicsError::Invalid(format!("t_end={t_end}, dt={dt}")));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let tables = StepTables::new(lam, h);
    let mut times = vec![0.0];
    let mut states = vec![u0.to_vec()];
    let mut u = u0.to_vec();
    for k in 1..=steps {
        u = tables.step(&mut f, &u);
        if u.iter().any(|x| !x.is_finite()) {
            return Err(DynamicsError::NonFinite { step: k, t: k as f64 * h });
        }
        if k % save_every == 0 || k == steps {
            times.push(k as f64 * h);
            states.push(u.clone());
        }
    }
    Ok(Trajectory { times, states })
}

/// Integrates `u' + Au = F(u)` from `u0` over `[0, t_end]`, saving every step.
///
/// Steps must respect `dt·L ≤ 0.5`.
pub fn integrate(model: &Model, u0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_every(model, u0, t_end, dt, 1)
}

pub fn integrate_every(model: &Model, u0: &[f64], t_end: f64, dt: f64, save_every: usize) -> Result<Trajectory> {
    let l = model.lipschitz();
    if dt * l > 0.5 {
        return Err(DynamicsError::StepBudget { dt, l });
    }
    if u0.len() != model.dim() {
        return Err(DynamicsError::Invalid(format!("state has {} modes, model {}", u0.len(), model.dim())));
    }
    let f = model.f.clone();
    integrate_diag(model.spectrum.values(), |u| f.eval(u), u0, t_end, dt, save_every)
}
