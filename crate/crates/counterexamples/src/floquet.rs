//! Periodic operator whose period map is the weighted shift
//! `e_{2n-1} ↦ μ e_{2n+1}`, `e_{2n} ↦ μ e_{2n-2}`, `e₂ ↦ μ₀ e₁`.

use crate::{adaptive_simpson, CounterexampleError, Result};
use dynamics::{decay_rate_fit_log, DecayFit};
use models::smooth_step;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral_core::Spectrum;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    /// half period; `Φ(x(t))` has period `2T`
    pub t: f64,
    /// profile amplitude, `x(t) = amp·sin(πt/T)`
    pub amp: f64,
    /// bound for `‖Φ(x)‖`
    pub l: f64,
    /// drop the first-mode compensation on the second half period
    /// (then `P₊e₁ = e^{-λ₁T}e₁` instead of `e^{-λ₁T/2}e₁`)
    pub literal_first_mode: bool,
}

impl OperatorParams {
    pub fn new(t: f64, l: f64) -> Self {
        Self { t, amp: 1.0, l, literal_first_mode: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOperator {
    pub lambda: Vec<f64>,
    pub params: OperatorParams,
    /// rotation rate magnitude
    pub eps: f64,
    /// first-mode compensation rate on `[T, 2T]`
    pub kappa: f64,
    /// `x(T₀) = amp/4`
    pub t0: f64,
    /// `∫_{T₀}^{T-T₀} θ₁(x(t)) dt`
    pub theta1_integral: f64,
    /// largest `‖Φ(x)‖` over the sampled profile
    pub norm_max: f64,
}

impl PeriodicOperator {
    pub fn modes(&self) -> usize {
        self.lambda.len()
    }

    pub fn profile(&self, t: f64) -> f64 {
        self.params.amp * (PI * t / self.params.t).sin()
    }

    pub fn theta1(&self, x: f64) -> f64 {
        let a = self.params.amp;
        smooth_step((x - 0.25 * a) / (0.25 * a))
    }

    pub fn theta2(&self, x: f64) -> f64 {
        smooth_step(x / (0.25 * self.params.amp))
    }

    /// `-Aw + Φ(x(t))w`
    pub fn rhs(&self, t: f64, w: &[f64], out: &mut [f64]) {
        let lam = &self.lambda;
        let m = lam.len();
        let x = self.profile(t);
        for i in 0..m {
            out[i] = -lam[i] * w[i];
        }
        if x > 0.0 {
            let (r, s) = (self.eps * self.theta1(x), self.theta2(x));
            let mut i = 0;
            while i + 1 < m {
                let d = 0.5 * (lam[i] - lam[i + 1]) * s;
                out[i] += d * w[i] + r * w[i + 1];
                out[i + 1] += -d * w[i + 1] - r * w[i];
                i += 2;
            }
        } else if x < 0.0 {
            let (r, s) = (self.eps * self.theta1(-x), self.theta2(-x));
            out[0] += self.kappa * s * w[0];
            let mut i = 1;
            while i + 1 < m {
                let d = 0.5 * (lam[i] - lam[i + 1]) * s;
                out[i] += d * w[i] + r * w[i + 1];
                out[i + 1] += -d * w[i + 1] - r * w[i];
                i += 2;
            }
        }
    }

    /// `‖Φ(x)‖`: blocks are `dθ₂σ_z + εθ₁J`, whose norm is `√(d²θ₂² + ε²θ₁²)`.
    pub fn norm_at(&self, x: f64) -> f64 {
        let lam = &self.lambda;
        let m = lam.len();
        let (y, start) = if x >= 0.0 { (x, 0) } else { (-x, 1) };
        let (r, s) = (self.eps * self.theta1(y), self.theta2(y));
        let mut n: f64 = if x < 0.0 { self.kappa * s } else { 0.0 };
        let mut i = start;
        while i + 1 < m {
            let d = 0.5 * (lam[i + 1] - lam[i]) * s;
            n = n.max((d * d + r * r).sqrt());
            i += 2;
        }
        n
    }

    /// RK4 from `t_start` to `t_end` in `steps` steps.
    pub fn propagate(&self, w0: &[f64], t_start: f64, t_end: f64, steps: usize) -> Result<Vec<f64>> {
        let m = w0.len();
        let h = (t_end - t_start) / steps as f64;
        let mut w = w0.to_vec();
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for j in 0..steps {
            let t = t_start + j as f64 * h;
            self.rhs(t, &w, &mut k1);
            for i in 0..m {
                tmp[i] = w[i] + 0.5 * h * k1[i];
            }
            self.rhs(t + 0.5 * h, &tmp, &mut k2);
            for i in 0..m {
                tmp[i] = w[i] + 0.5 * h * k2[i];
            }
            self.rhs(t + 0.5 * h, &tmp, &mut k3);
            for i in 0..m {
                tmp[i] = w[i] + h * k3[i];
            }
            self.rhs(t + h, &tmp, &mut k4);
            for i in 0..m {
                w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        if w.iter().all(|v| v.is_finite()) {
            Ok(w)
        } else {
            Err(CounterexampleError::NonFinite)
        }
    }

    /// `μ_n`, 1-based `n` with `n + 2 ≤ M`, in log form.
    pub fn log_mu(&self, n: usize) -> f64 {
        let l = &self.lambda;
        -self.params.t * (l[n - 1] + 2.0 * l[n] + l[n + 1]) / 2.0
    }

    pub fn log_mu0(&self) -> f64 {
        let l = &self.lambda;
        if self.params.literal_first_mode {
            -self.params.t * (3.0 * l[0] + l[1]) / 2.0
        } else {
            -self.params.t * (2.0 * l[0] + l[1]) / 2.0
        }
    }

    /// Shift target of basis vector `j` (1-based) and its predicted log
    /// multiplier; `None` for the unpaired top mode.
    pub fn shift_of(&self, j: usize) -> Option<(usize, f64)> {
        let m = self.modes();
        if j == 2 {
            return Some((1, self.log_mu0()));
        }
        if j % 2 == 1 {
            (j + 2 <= m).then(|| (j + 2, self.log_mu(j)))
        } else {
            (j <= m).then(|| (j - 2, self.log_mu(j - 2)))
        }
    }
}

/// Assembles `Φ(x(t))` on the truncation of `spec`.
pub fn build_periodic_operator(spec: &Spectrum, params: OperatorParams) -> Result<PeriodicOperator> {
    let lambda = spec.values().to_vec();
    let m = lambda.len();
    if m < 4 {
        return Err(CounterexampleError::Invalid("need at least 4 modes".into()));
    }
    if !(params.t > 0.0 && params.amp > 0.0) {
        return Err(CounterexampleError::Invalid("period and amplitude must be positive".into()));
    }
    let gap_max = lambda.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let threshold = (0.5 * gap_max).max(lambda[1]);
    if params.l <= threshold {
        return Err(CounterexampleError::BelowThreshold { l: params.l, threshold });
    }
    let t = params.t;
    let t0 = t / PI * 0.25f64.asin();
    let mut op = PeriodicOperator { lambda, params, eps: 0.0, kappa: 0.0, t0, theta1_integral: 0.0, norm_max: 0.0 };
    let th1 = {
        let o = &op;
        adaptive_simpson(&|s| o.theta1(o.profile(s)), t0, t - t0, 1e-14)?
    };
    op.theta1_integral = th1;
    op.eps = PI / (2.0 * th1);
    if !op.params.literal_first_mode {
        let o = &op;
        let th2 = adaptive_simpson(&|s| o.theta2(-o.profile(s)), t, 2.0 * t, 1e-14)?;
        op.kappa = op.lambda[0] * t / (2.0 * th2);
    }
    let samples = 4001;
    op.norm_max = (0..samples)
        .map(|k| op.norm_at(op.params.amp * (2.0 * k as f64 / (samples - 1) as f64 - 1.0)))
        .fold(0.0, f64::max);
    if op.norm_max > op.params.l {
        return Err(CounterexampleError::NormBound { norm: op.norm_max, l: op.params.l });
    }
    Ok(op)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftCheck {
    /// 1-based source and target modes
    pub source: usize,
    pub target: usize,
    /// signed coefficient of `P e_source` on `e_target`
    pub measured: f64,
    pub predicted: f64,
    pub rel_error: f64,
    /// off-target mass relative to `|measured|`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub modes: usize,
    pub t: f64,
    pub eps: f64,
    pub kappa: f64,
    pub steps: usize,
    /// `images[j] = P e_{j+1}`
    pub images: Vec<Vec<f64>>,
    pub checks: Vec<ShiftCheck>,
    pub max_rel_error: f64,
    pub max_residual: f64,
    /// modes without a shift partner inside the truncation
    pub excluded: Vec<usize>,
}

/// Period map `U(2T, 0)` on every basis vector, by RK4 with `steps` steps.
pub fn poincare_map(op: &PeriodicOperator, steps: usize) -> Result<PoincareReport> {
    let m = op.modes();
    let t = op.params.t;
    if steps < 2000 {
        return Err(CounterexampleError::Invalid("use at least 1000 steps per half period".into()));
    }
    let images: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|j| op.propagate(&spectral_core::basis(m, j), 0.0, 2.0 * t, steps))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut excluded = Vec::new();
    for j in 1..=m {
        match op.shift_of(j) {
            Some((target, log_mu)) => {
                let img = &images[j - 1];
                let measured = img[target - 1];
                let predicted = log_mu.exp();
                let off: f64 =
                    img.iter().enumerate().filter(|(i, _)| *i != target - 1).map(|(_, v)| v * v).sum::<f64>().sqrt();
                checks.push(ShiftCheck {
                    source: j,
                    target,
                    measured,
                    predicted,
                    rel_error: (measured.abs() / predicted - 1.0).abs(),
                    residual: off / measured.abs(),
                });
            }
            None => excluded.push(j),
        }
    }
    let max_rel_error = checks.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    let max_residual = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    Ok(PoincareReport { modes: m, t, eps: op.eps, kappa: op.kappa, steps, images, checks, max_rel_error, max_residual, excluded })
}

/// `log‖Pᴺe_j‖` along the shift chain, from measured coefficients
/// (`report`) or from the multiplier formula (`None`).
pub fn chain_log_norm(op: &PeriodicOperator, report: Option<&PoincareReport>, start: usize, n: usize) -> Result<f64> {
    let mut mode = start;
    let mut acc = 0.0;
    for step in 0..n {
        let (target, log_mu) = op.shift_of(mode).ok_or(CounterexampleError::ChainTruncated { step, mode })?;
        acc += match report {
            Some(r) => r.images[mode - 1][target - 1].abs().ln(),
            None => log_mu,
        };
        mode = target;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    pub log_norm_map: f64,
    pub log_norm_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    /// `log‖Pᴺe₂‖ ≈ c + bN + aN²`
    pub fit: DecayFit,
    /// `[-C₂T, -C₁T/2]`, with `e^{-C₂Tn} ≤ μ_n ≤ e^{-C₁Tn}` on the truncation
    pub bracket: (f64, f64),
    pub in_bracket: bool,
    pub max_log_diff: f64,
}

/// `‖Pᴺe₂‖` for `N = 1..=n_iter`, in log domain.
pub fn superexp_decay(op: &PeriodicOperator, report: &PoincareReport, n_iter: usize) -> Result<DecayTable> {
    let rows: Vec<DecayRow> = (1..=n_iter)
        .map(|n| {
            Ok(DecayRow {
                n,
                log_norm_map: chain_log_norm(op, Some(report), 2, n)?,
                log_norm_product: chain_log_norm(op, None, 2, n)?,
            })
        })
        .collect::<Result<_>>()?;
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let logs: Vec<f64> = rows.iter().map(|r| r.log_norm_map).collect();
    let fit = decay_rate_fit_log(&ns, &logs)?;
    let m = op.modes();
    let t = op.params.t;
    let c: Vec<f64> = (1..=m - 2).map(|n| -op.log_mu(n) / (t * n as f64)).collect();
    let c1 = c.iter().copied().fold(f64::INFINITY, f64::min);
    let c2 = c.iter().copied().fold(0.0, f64::max);
    let bracket = (-c2 * t, -c1 * t / 2.0);
    let in_bracket = fit.quad_coeff >= bracket.0 && fit.quad_coeff <= bracket.1;
    let max_log_diff = rows.iter().map(|r| (r.log_norm_map - r.log_norm_product).abs()).fold(0.0, f64::max);
    Ok(DecayTable { rows, fit, bracket, in_bracket, max_log_diff })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonuniformRatios {
    pub n: usize,
    pub k: usize,
    pub big_n: usize,
    /// `max_{s} log(‖Pᴺe₁‖/‖Pᴺe_{2s}‖)`
    pub first_log_max: f64,
    /// `-first_log_max / n²`
    pub beta: f64,
    /// `max_{s₁,s₂} |log(‖Pᴺe_{2s₁}‖/‖Pᴺe_{2s₂}‖)|`
    pub middle_log_max: f64,
    /// `middle_log_max / n^{3/2}`
    pub gamma: f64,
    /// largest gap between measured-chain and product logs
    pub max_log_diff: f64,
}

/// Ratios of Lemma-type estimates with `k = ⌊√n⌋`, `N = 2n + k`,
/// `n ≤ s ≤ n + k`.
pub fn nonuniform_ratios(op: &PeriodicOperator, report: Option<&PoincareReport>, n: usize) -> Result<NonuniformRatios> {
    let k = (n as f64).sqrt().floor() as usize;
    if k == 0 {
        return Err(CounterexampleError::Invalid("n must be at least 1".into()));
    }
    let big_n = 2 * n + k;
    let both = |start: usize| -> Result<(f64, f64)> {
        let p = chain_log_norm(op, None, start, big_n)?;
        let m = match report {
            Some(r) => chain_log_norm(op, Some(r), start, big_n)?,
            None => p,
        };
        Ok((m, p))
    };
    let (e1, e1p) = both(1)?;
    let mut max_diff = (e1 - e1p).abs();
    let mut evens = Vec::new();
    for s in n..=n + k {
        let (v, vp) = both(2 * s)?;
        max_diff = max_diff.max((v - vp).abs());
        evens.push(v);
    }
    let first_log_max = evens.iter().map(|v| e1 - v).fold(f64::NEG_INFINITY, f64::max);
    let hi = evens.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = evens.iter().copied().fold(f64::INFINITY, f64::min);
    let nf = n as f64;
    Ok(NonuniformRatios {
        n,
        k,
        big_n,
        first_log_max,
        beta: -first_log_max / (nf * nf),
        middle_log_max: hi - lo,
        gamma: (hi - lo) / nf.powf(1.5),
        max_log_diff: max_diff,
    })
}

/// Samples `w(t)` of the periodic linear equation from `w0` at
/// `per_period` equally spaced times over `periods` periods, paired with the
/// zero solution: the differences of two trajectories on the attractor.
pub fn floquet_pair_data(
    op: &PeriodicOperator,
    w0: &[f64],
    periods: usize,
    per_period: usize,
    steps_per_sample: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let h = 2.0 * op.params.t / per_period as f64;
    let mut w = w0.to_vec();
    let mut times = vec![0.0];
    let mut out = vec![w.clone()];
    for i in 0..periods * per_period {
        let t = i as f64 * h;
        w = op.propagate(&w, t, t + h, steps_per_sample)?;
        times.push(t + h);
        out.push(w.clone());
    }
    Ok((times, out))
}
