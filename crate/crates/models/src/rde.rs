//! Reaction–diffusion nonlinearity `F(u) = -f(x, u)` on the Dirichlet sine grid.

use crate::grid::SineGrid;
use crate::nonlinearity::Nonlinearity;
use crate::{ModelError, Result};
use spectral_core::{dot, norm};
use std::sync::Arc;

/// Largest slope of [`smooth_step`], attained at `t = 1/2`.
pub const SMOOTH_STEP_MAX_SLOPE: f64 = 2.0;

fn mollifier(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// `C^∞` monotone step, 0 for `t ≤ 0` and 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    let a = mollifier(t);
    let b = mollifier(1.0 - t);
    if a + b == 0.0 {
        return if t > 0.5 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

pub fn smooth_step_slope(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let (a, b) = (mollifier(t), mollifier(1.0 - t));
    let (da, db) = (a / (t * t), b / ((1.0 - t) * (1.0 - t)));
    (da * b + a * db) / ((a + b) * (a + b))
}

type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `f(x, u)` with its `u`-derivative and the global constants the caller vouches for.
#[derive(Clone)]
pub struct ScalarField {
    pub f: ScalarFn,
    pub fu: ScalarFn,
    /// `sup |∂_u f|`
    pub sup_fu: f64,
    /// `sup |f|`, if `f` is bounded
    pub sup_f: Option<f64>,
    pub label: String,
}

impl ScalarField {
    pub fn new(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        fu: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        sup_fu: f64,
        sup_f: Option<f64>,
        label: impl Into<String>,
    ) -> Self {
        Self { f: Arc::new(f), fu: Arc::new(fu), sup_fu, sup_f, label: label.into() }
    }
}

/// `f(u) = -κu/(1+u²)`: agrees with the Chafee–Infante cubic `κ(u³ - u)` to
/// third order at 0, with `sup|f'| = κ` and `sup|f| = κ/2`.
pub fn saturated_chafee_infante(kappa: f64) -> ScalarField {
    ScalarField::new(
        move |_x, u| -kappa * u / (1.0 + u * u),
        move |_x, u| -kappa * (1.0 - u * u) / ((1.0 + u * u) * (1.0 + u * u)),
        kappa.abs(),
        Some(0.5 * kappa.abs()),
        format!("saturated-ci(kappa={kappa})"),
    )
}

/// Collocation nonlinearity with an optional radial cut-off `ψ(‖u‖)`,
/// `ψ = 1` on `[0, R]` and `0` on `[2R, ∞)`.
#[derive(Clone)]
pub struct RdeNonlinearity {
    field: ScalarField,
    grid: SineGrid,
    radius: Option<f64>,
    lipschitz: f64,
    bound: f64,
}

pub fn rde_nonlinearity(field: ScalarField, grid: SineGrid, cutoff_radius: Option<f64>) -> Result<RdeNonlinearity> {
    if let Some(r) = cutoff_radius {
        if !(r > 0.0) {
            return Err(ModelError::Invalid(format!("cut-off radius {r}")));
        }
    }
    let mut out = RdeNonlinearity { field, grid, radius: cutoff_radius, lipschitz: 0.0, bound: 0.0 };
    let h = out.grid.sup_to_h();
    let sup_bound = out.field.sup_f.map(|s| s * h).unwrap_or(f64::INFINITY);
    match cutoff_radius {
        Some(r) => {
            let f0 = norm(&out.raw(&vec![0.0; out.grid.modes()]));
            let c2r = sup_bound.min(f0 + 2.0 * r * out.field.sup_fu);
            out.lipschitz = out.field.sup_fu + SMOOTH_STEP_MAX_SLOPE / r * c2r;
            out.bound = c2r;
        }
        None => {
            out.lipschitz = out.field.sup_fu;
            out.bound = sup_bound;
        }
    }
    Ok(out)
}

impl RdeNonlinearity {
    pub fn grid(&self) -> &SineGrid {
        &self.grid
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// Without the cut-off.
    pub fn raw(&self, u: &[f64]) -> Vec<f64> {
        let vals = self.grid.to_grid(u);
        let g: Vec<f64> = vals
            .iter()
            .enumerate()
            .map(|(j, &v)| -(self.field.f)(self.grid.x(j), v))
            .collect();
        self.grid.from_grid(&g)
    }

    fn raw_derivative(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let uv = self.grid.to_grid(u);
        let vv = self.grid.to_grid(v);
        let g: Vec<f64> = (0..uv.len())
            .map(|j| -(self.field.fu)(self.grid.x(j), uv[j]) * vv[j])
            .collect();
        self.grid.from_grid(&g)
    }

    fn psi(&self, r: f64) -> (f64, f64) {
        match self.radius {
            None => (1.0, 0.0),
            Some(rad) => {
                let t = (r - rad) / rad;
                (1.0 - smooth_step(t), -smooth_step_slope(t) / rad)
            }
        }
    }
}

impl Nonlinearity for RdeNonlinearity {
    fn dim(&self) -> usize {
        self.grid.modes()
    }

    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let (p, _) = self.psi(norm(u));
        if p == 0.0 {
            return vec![0.0; u.len()];
        }
        let mut f = self.raw(u);
        if p != 1.0 {
            f.iter_mut().for_each(|x| *x *= p);
        }
        f
    }

    fn derivative_action(&self, u: &[f64], v: &[f64]) -> Option<Vec<f64>> {
        let r = norm(u);
        let (p, dp) = self.psi(r);
        if p == 0.0 {
            return Some(vec![0.0; u.len()]);
        }
        let mut d = self.raw_derivative(u, v);
        d.iter_mut().for_each(|x| *x *= p);
        if dp != 0.0 && r > 0.0 {
            let f = self.raw(u);
            let s = dp * dot(u, v) / r;
            d.iter_mut().zip(&f).for_each(|(x, fi)| *x += s * fi);
        }
        Some(d)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn name(&self) -> String {
        match self.radius {
            Some(r) => format!("rde[{}; cutoff {r}]", self.field.label),
            None => format!("rde[{}]", self.field.label),
        }
    }
}


/// Dirichlet system `u_t - u_xx = κu/(1+u²)` truncated at `m` modes on the
/// dealiased grid, with radial cut-off at `radius`.
pub fn saturated_rde_model(m: usize, kappa: f64, radius: f64) -> Result<crate::Model> {
    let spec = crate::spectrum_interval(m, 1.0, 0.0)?;
    let f = rde_nonlinearity(saturated_chafee_infante(kappa), SineGrid::dealiased(m), Some(radius))?;
    crate::Model::new(spec, Arc::new(f))
}
