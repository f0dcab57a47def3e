//! Planar saddle-node ODE whose phase selects a kick on one mode of `H`,
//! embedding the segments `[0, B_nλ_n^{-1}] e_n` into the attractor.

use crate::{CounterexampleError, Result};
use models::smooth_step;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral_core::Spectrum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentsParams {
    /// kick amplitudes `B_n`, decreasing
    pub b: Vec<f64>,
    /// phase widths `E_n`, `ΣE_n < 2π`
    pub e: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    /// initial radius of the trajectories leaving the origin
    pub r0: f64,
}

impl SegmentsParams {
    /// `B_n = n^{-log n}`, `E_n = n^{-2}`.
    pub fn standard(n: usize) -> Self {
        Self {
            b: (1..=n).map(|k| (-(k as f64).ln().powi(2)).exp()).collect(),
            e: (1..=n).map(|k| 1.0 / (k * k) as f64).collect(),
            horizon: 30.0,
            dt: 1e-3,
            r0: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentsAttractor {
    /// phase centres `φ_n`
    pub phases: Vec<f64>,
    /// `B_nλ_n^{-1}`
    pub lengths: Vec<f64>,
    /// `w` at the horizon of the trajectory through `φ_n`
    pub endpoints: Vec<Vec<f64>>,
    /// `|w(horizon) - B_nλ_n^{-1}e_n|`
    pub endpoint_errors: Vec<f64>,
    /// `Q₂` projections of all samples
    pub cloud: Vec<Vec<f64>>,
}

struct Kicks {
    lam: Vec<f64>,
    b: Vec<f64>,
    centres: Vec<f64>,
    half_widths: Vec<f64>,
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

impl Kicks {
    fn rhs(&self, z: &[f64], out: &mut [f64]) {
        let (x, y) = (z[0], z[1]);
        let r2 = x * x + y * y;
        out[0] = -x * (r2 - 1.0);
        out[1] = -y * (r2 - 1.0);
        let theta = smooth_step((r2.sqrt() - 0.25) / 0.25);
        let phi = y.atan2(x).rem_euclid(std::f64::consts::TAU);
        for (n, &l) in self.lam.iter().enumerate() {
            let mut f = 0.0;
            if theta > 0.0 {
                f = self.b[n] * theta * bump((phi - self.centres[n]) / self.half_widths[n]);
            }
            out[2 + n] = -l * z[2 + n] + f;
        }
    }

    fn run(&self, z0: Vec<f64>, horizon: f64, dt: f64, keep: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let m = z0.len();
        let steps = (horizon / dt).ceil() as usize;
        let h = horizon / steps as f64;
        let mut z = z0;
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let mut samples = Vec::new();
        for j in 0..steps {
            self.rhs(&z, &mut k1);
            for i in 0..m {
                tmp[i] = z[i] + 0.5 * h * k1[i];
            }
            self.rhs(&tmp, &mut k2);
            for i in 0..m {
                tmp[i] = z[i] + 0.5 * h * k2[i];
            }
            self.rhs(&tmp, &mut k3);
            for i in 0..m {
                tmp[i] = z[i] + h * k3[i];
            }
            self.rhs(&tmp, &mut k4);
            for i in 0..m {
                z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if keep > 0 && j % keep == 0 {
                samples.push(z[2..].to_vec());
            }
        }
        (z, samples)
    }
}

fn kicks(spec: &Spectrum, p: &SegmentsParams) -> Result<Kicks> {
    let n = p.b.len();
    if p.e.len() != n || spec.len() < n || n == 0 {
        return Err(CounterexampleError::Invalid("B, E and spectrum lengths disagree".into()));
    }
    if p.e.iter().sum::<f64>() >= std::f64::consts::TAU || p.e.iter().any(|&e| e <= 0.0) {
        return Err(CounterexampleError::Invalid("phase widths must be positive with sum below 2π".into()));
    }
    if p.b.windows(2).any(|w| w[1] > w[0]) || p.b.iter().any(|&b| b <= 0.0) {
        return Err(CounterexampleError::Invalid("B_n must be positive and nonincreasing".into()));
    }
    let mut start = 0.0;
    let mut centres = Vec::with_capacity(n);
    for &e in &p.e {
        centres.push(start + 0.5 * e);
        start += e;
    }
    Ok(Kicks {
        lam: spec.values()[..n].to_vec(),
        b: p.b.clone(),
        half_widths: p.e.iter().map(|e| 0.5 * e).collect(),
        centres,
    })
}

/// Trajectories leaving the origin along every kick centre; the `w` samples
/// trace the segments.
pub fn segments_attractor(spec: &Spectrum, p: &SegmentsParams) -> Result<SegmentsAttractor> {
    let k = kicks(spec, p)?;
    let n = k.b.len();
    let runs: Vec<(Vec<f64>, Vec<Vec<f64>>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut z0 = vec![0.0; n + 2];
            z0[0] = p.r0 * k.centres[i].cos();
            z0[1] = p.r0 * k.centres[i].sin();
            k.run(z0, p.horizon, p.dt, 1)
        })
        .collect();
    let lengths: Vec<f64> = (0..n).map(|i| k.b[i] / k.lam[i]).collect();
    let mut endpoints = Vec::with_capacity(n);
    let mut endpoint_errors = Vec::with_capacity(n);
    let mut cloud = vec![vec![0.0; n]];
    for (i, (z, samples)) in runs.into_iter().enumerate() {
        let w = z[2..].to_vec();
        let err = w.iter().enumerate().map(|(j, v)| if j == i { v - lengths[i] } else { *v }).map(|v| v * v).sum::<f64>().sqrt();
        endpoint_errors.push(err);
        endpoints.push(w);
        cloud.extend(samples);
    }
    Ok(SegmentsAttractor { phases: k.centres, lengths, endpoints, endpoint_errors, cloud })
}

/// Final `w` of one trajectory started at `(R cos φ, R sin φ, 0)`.
pub fn segments_trajectory(spec: &Spectrum, p: &SegmentsParams, phi: f64, r: f64) -> Result<Vec<f64>> {
    let k = kicks(spec, p)?;
    let n = k.b.len();
    let mut z0 = vec![0.0; n + 2];
    z0[0] = r * phi.cos();
    z0[1] = r * phi.sin();
    Ok(k.run(z0, p.horizon, p.dt, 0).0[2..].to_vec())
}

/// `sup_n B_nλ_n^sE_n^{-k}` for `B_n = n^{-log n}`, `λ_n = n^κ`,
/// `E_n = n^{-2}`: the log of the term is `-(log n)² + c log n`,
/// `c = κs + 2k`, so the supremum is `exp(c²/4)` (at `log n = c/2`), and is
/// finite for every `s`, `k`. Returns it together with the largest term among
/// `n ≤ n_max`.
pub fn smoothness_budget(s: f64, k: f64, kappa: f64, n_max: usize) -> (f64, f64) {
    let c = kappa * s + 2.0 * k;
    let sup = if c > 0.0 { (c * c / 4.0).exp() } else { 1.0 };
    let observed = (1..=n_max)
        .map(|n| {
            let l = (n as f64).ln();
            (-l * l + c * l).exp()
        })
        .fold(0.0, f64::max);
    (sup, observed)
}

