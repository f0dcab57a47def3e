use crate::{CounterexampleError, Result};
use serde::{Deserialize, Serialize};
use spectral_core::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eig {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equilibrium {
    /// `u₋ = -N e₁`, rotation blocks on `(2n-1, 2n)`
    Minus,
    /// `u₊ = N e₁`, expanding first mode and blocks on `(2n, 2n+1)`
    Plus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C1Spectra {
    pub l: f64,
    pub minus: Vec<Eig>,
    pub plus: Vec<Eig>,
    pub minus_real: usize,
    pub plus_real: usize,
    /// `L - λ₁`
    pub unstable: f64,
    /// unpaired top mode left out of the block count, 1-based
    pub minus_tail: Option<usize>,
    pub plus_tail: Option<usize>,
}

fn block(a: f64, b: f64, l: f64) -> [Eig; 2] {
    let alpha = -0.5 * (a + b);
    let disc = 4.0 * l * l - (b - a) * (b - a);
    if disc > 0.0 {
        let w = 0.5 * disc.sqrt();
        [Eig { re: alpha, im: w }, Eig { re: alpha, im: -w }]
    } else {
        let r = 0.5 * (-disc).sqrt();
        [Eig { re: alpha + r, im: 0.0 }, Eig { re: alpha - r, im: 0.0 }]
    }
}

/// Closed-form spectra of the linearisations at `u₋` and `u₊`.
pub fn c1_obstruction_spectra(spec: &Spectrum, l: f64) -> Result<C1Spectra> {
    let lam = spec.values();
    let m = lam.len();
    if m < 3 {
        return Err(CounterexampleError::Invalid("need at least 3 modes".into()));
    }
    if l <= lam[0] {
        return Err(CounterexampleError::BelowThreshold { l, threshold: lam[0] });
    }
    for i in 0..m - 1 {
        let gap = lam[i + 1] - lam[i];
        if gap >= 2.0 * l {
            return Err(CounterexampleError::RotationCondition { block: i + 1, gap, l });
        }
    }
    let mut minus = Vec::with_capacity(m);
    for n in (0..m - 1).step_by(2) {
        minus.extend(block(lam[n], lam[n + 1], l));
    }
    let mut plus = vec![Eig { re: l - lam[0], im: 0.0 }];
    for n in (1..m - 1).step_by(2) {
        plus.extend(block(lam[n], lam[n + 1], l));
    }
    let real = |v: &[Eig]| v.iter().filter(|e| e.im == 0.0).count();
    Ok(C1Spectra {
        l,
        minus_real: real(&minus),
        plus_real: real(&plus),
        minus,
        plus,
        unstable: l - lam[0],
        minus_tail: (m % 2 == 1).then_some(m),
        plus_tail: (m % 2 == 0).then_some(m),
    })
}

/// Jacobian `-A + F'(u±)` of the truncated system, row-major `m × m`.
pub fn linearization(spec: &Spectrum, l: f64, at: Equilibrium) -> Vec<Vec<f64>> {
    let lam = spec.values();
    let m = lam.len();
    let mut j = vec![vec![0.0; m]; m];
    for (i, row) in j.iter_mut().enumerate() {
        row[i] = -lam[i];
    }
    let first = match at {
        Equilibrium::Minus => 0,
        Equilibrium::Plus => {
            j[0][0] += l;
            1
        }
    };
    let mut i = first;
    while i + 1 < m {
        j[i][i + 1] = l;
        j[i + 1][i] = -l;
        i += 2;
    }
    j
}
