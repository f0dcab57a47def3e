//! The nonlinearity contract and a few closed-form nonlinearities.

use crate::{ModelError, Result};
use nalgebra::DMatrix;
use spectral_core::{norm, Spectrum};
use std::sync::Arc;

/// `F: H → H^β` in eigen-coefficients, with declared global constants.
pub trait Nonlinearity: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, u: &[f64]) -> Vec<f64>;
    /// `F'(u) v`, when available in closed form.
    fn derivative_action(&self, _u: &[f64], _v: &[f64]) -> Option<Vec<f64>> {
        None
    }
    /// Declared global Lipschitz constant, `H → H^β`.
    fn lipschitz(&self) -> f64;
    fn smoothing_beta(&self) -> f64 {
        0.0
    }
    /// Declared global bound of `‖F(u)‖_{H^β}`; `INFINITY` if there is none.
    fn bound(&self) -> f64;
    fn name(&self) -> String;
}

/// A spectrum together with a nonlinearity of matching dimension.
#[derive(Clone)]
pub struct Model {
    pub spectrum: Spectrum,
    pub f: Arc<dyn Nonlinearity>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Model({}, {})", self.spectrum.source(), self.f.name())
    }
}

impl Model {
    pub fn new(spectrum: Spectrum, f: Arc<dyn Nonlinearity>) -> Result<Self> {
        if f.dim() != spectrum.len() {
            return Err(ModelError::DimensionMismatch { got: f.dim(), want: spectrum.len() });
        }
        Ok(Self { spectrum, f })
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    pub fn lipschitz(&self) -> f64 {
        self.f.lipschitz()
    }

    /// `-Au + F(u)`.
    pub fn rhs(&self, u: &[f64]) -> Vec<f64> {
        let mut r = self.f.eval(u);
        for ((ri, l), x) in r.iter_mut().zip(self.spectrum.values()).zip(u) {
            *ri -= l * x;
        }
        r
    }
}

#[derive(Debug, Clone)]
pub struct ZeroNonlinearity(pub usize);

impl Nonlinearity for ZeroNonlinearity {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, _u: &[f64]) -> Vec<f64> {
        vec![0.0; self.0]
    }
    fn derivative_action(&self, _u: &[f64], _v: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; self.0])
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn bound(&self) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        "zero".into()
    }
}

/// `F(u) = c`.
#[derive(Debug, Clone)]
pub struct ConstantForcing(pub Vec<f64>);

impl Nonlinearity for ConstantForcing {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn eval(&self, _u: &[f64]) -> Vec<f64> {
        self.0.clone()
    }
    fn derivative_action(&self, _u: &[f64], _v: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; self.0.len()])
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn bound(&self) -> f64 {
        norm(&self.0)
    }
    fn name(&self) -> String {
        "constant".into()
    }
}

/// `F(u) = Bu`; `L` is the spectral norm of `B`.
#[derive(Debug, Clone)]
pub struct LinearMap {
    b: DMatrix<f64>,
    l: f64,
    label: String,
}

impl LinearMap {
    pub fn new(b: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        if !b.is_square() {
            return Err(ModelError::Invalid("linear map must be square".into()));
        }
        let l = b.clone().singular_values().max();
        Ok(Self { b, l, label: label.into() })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.b
    }
}

impl Nonlinearity for LinearMap {
    fn dim(&self) -> usize {
        self.b.nrows()
    }
    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let m = self.b.nrows();
        (0..m).map(|i| (0..m).map(|j| self.b[(i, j)] * u[j]).sum()).collect()
    }
    fn derivative_action(&self, _u: &[f64], v: &[f64]) -> Option<Vec<f64>> {
        Some(self.eval(v))
    }
    fn lipschitz(&self) -> f64 {
        self.l
    }
    fn bound(&self) -> f64 {
        if self.l == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn name(&self) -> String {
        self.label.clone()
    }
}

/// Rotation coupling `F_n = L u_{n+1}`, `F_{n+1} = -L u_n` between modes `n` and
/// `n+1` (1-based); norm exactly `L`.
#[derive(Debug, Clone)]
pub struct BlockRotation {
    pub m: usize,
    pub n: usize,
    pub strength: f64,
}

impl BlockRotation {
    pub fn new(m: usize, n: usize, strength: f64) -> Result<Self> {
        if n == 0 || n >= m {
            return Err(ModelError::Invalid(format!("rotation block {n} outside 1..{m}")));
        }
        Ok(Self { m, n, strength })
    }
}

impl Nonlinearity for BlockRotation {
    fn dim(&self) -> usize {
        self.m
    }
    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        let (a, b) = (self.n - 1, self.n);
        out[a] = self.strength * u[b];
        out[b] = -self.strength * u[a];
        out
    }
    fn derivative_action(&self, _u: &[f64], v: &[f64]) -> Option<Vec<f64>> {
        Some(self.eval(v))
    }
    fn lipschitz(&self) -> f64 {
        self.strength.abs()
    }
    fn bound(&self) -> f64 {
        f64::INFINITY
    }
    fn name(&self) -> String {
        format!("rotation({},{})", self.n, self.n + 1)
    }
}

/// Saturated Hopf oscillator on the first two modes, driving modes 3 and 4.
///
/// In the `(u_1, u_2)` plane `ż = σ(1 - s(r²)) z + iωz` with `s(x) = 2x/(1+x)`,
/// so `r = 1` is a stable limit cycle; modes 3, 4 receive the bounded second
/// harmonic `β(u_1² - u_2², 2u_1u_2)/(1 + r²)`.
#[derive(Debug, Clone)]
pub struct HopfCycle {
    m: usize,
    lam: [f64; 2],
    pub sigma: f64,
    pub omega: f64,
    pub beta: f64,
}

impl HopfCycle {
    pub fn new(spec: &Spectrum, sigma: f64, omega: f64, beta: f64) -> Result<Self> {
        if spec.len() < 4 {
            return Err(ModelError::Invalid("Hopf model needs at least 4 modes".into()));
        }
        let v = spec.values();
        Ok(Self { m: spec.len(), lam: [v[0], v[1]], sigma, omega, beta })
    }
}

impl Nonlinearity for HopfCycle {
    fn dim(&self) -> usize {
        self.m
    }
    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        let (x, y) = (u[0], u[1]);
        let r2 = x * x + y * y;
        let g = self.sigma * (1.0 - 2.0 * r2 / (1.0 + r2));
        out[0] = self.lam[0] * x + g * x - self.omega * y;
        out[1] = self.lam[1] * y + g * y + self.omega * x;
        out[2] = self.beta * (x * x - y * y) / (1.0 + r2);
        out[3] = self.beta * 2.0 * x * y / (1.0 + r2);
        out
    }
    fn lipschitz(&self) -> f64 {
        // |∂((1 - s)z)| ≤ 1.25 and the harmonic map has slope ≤ 2
        self.lam[1] + 1.25 * self.sigma.abs() + self.omega.abs() + 2.0 * self.beta.abs()
    }
    fn bound(&self) -> f64 {
        f64::INFINITY
    }
    fn name(&self) -> String {
        "hopf-cycle".into()
    }
}
