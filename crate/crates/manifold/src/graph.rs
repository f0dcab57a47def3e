//! Box grids in `P_N` coordinates, the pointwise builder and interpolation.

use crate::bvp::{build_graph_bvp, BvpOptions};
use crate::lp::{build_graph_lp, LpOptions};
use crate::{ManifoldError, Result};
use models::Model;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral_core::{dist, norm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bvp,
    Lp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MethodOptions {
    Bvp(BvpOptions),
    Lp(LpOptions),
}

impl MethodOptions {
    pub fn method(&self) -> Method {
        match self {
            MethodOptions::Bvp(_) => Method::Bvp,
            MethodOptions::Lp(_) => Method::Lp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Multilinear,
    /// tensor Catmull–Rom, linear ghost nodes at the faces
    Cubic,
}

/// Uniform box grid; node order is row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points: Vec<usize>,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != points.len() || lo.is_empty() {
            return Err(ManifoldError::Invalid("grid axes disagree".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) || points.iter().any(|&p| p < 2) {
            return Err(ManifoldError::Invalid("each axis needs lo < hi and at least 2 points".into()));
        }
        Ok(Self { lo, hi, points })
    }

    /// `[-r, r]^n` with `p` points per axis.
    pub fn cube(n: usize, r: f64, p: usize) -> Result<Self> {
        Self::new(vec![-r; n], vec![r; n], vec![p; n])
    }

    pub fn dims(&self) -> usize {
        self.points.len()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self, d: usize) -> f64 {
        (self.hi[d] - self.lo[d]) / (self.points[d] - 1) as f64
    }

    pub fn node(&self, mut flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dims()];
        for d in (0..self.dims()).rev() {
            let i = flat % self.points[d];
            flat /= self.points[d];
            x[d] = self.lo[d] + i as f64 * self.step(d);
        }
        x
    }

    pub fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.points).fold(0, |acc, (i, p)| acc * p + i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointLog {
    pub index: usize,
    /// Newton iterations (bvp) or fixed-point iterations (lp)
    pub iterations: usize,
    /// final horizon difference (bvp) or last iterate difference (lp)
    pub last_diff: f64,
    /// largest contraction ratio seen (lp only)
    pub max_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldGraph {
    pub n: usize,
    pub modes: usize,
    pub grid: GridSpec,
    /// `Φ` at each node, `modes - n` coefficients each
    pub values: Vec<Vec<f64>>,
    pub interpolation: Interpolation,
    pub lipschitz_est: f64,
    pub method: Method,
    pub log: Vec<PointLog>,
}

fn point_value(model: &Model, n: usize, x: &[f64], opts: &MethodOptions, index: usize) -> Result<(Vec<f64>, PointLog)> {
    match opts {
        MethodOptions::Bvp(o) => {
            let r = build_graph_bvp(model, n, x, o)?;
            let last_diff = r.schedule.last().map_or(f64::NAN, |s| s.1);
            Ok((r.value, PointLog { index, iterations: r.newton_iterations, last_diff, max_ratio: None }))
        }
        MethodOptions::Lp(o) => {
            let r = build_graph_lp(model, n, x, o)?;
            let max_ratio = r.ratios.iter().cloned().fold(None, |a: Option<f64>, b| Some(a.map_or(b, |a| a.max(b))));
            let last_diff = *r.diffs.last().unwrap();
            Ok((r.value, PointLog { index, iterations: r.iterations, last_diff, max_ratio }))
        }
    }
}

/// Largest `‖Φ(x) - Φ(y)‖ / ‖x - y‖` over node pairs.
pub fn pairwise_lipschitz(nodes: &[Vec<f64>], values: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let dx = dist(&nodes[i], &nodes[j]);
            if dx > 0.0 {
                best = best.max(dist(&values[i], &values[j]) / dx);
            }
        }
    }
    best
}

pub fn build_manifold(
    model: &Model,
    n: usize,
    grid: &GridSpec,
    opts: &MethodOptions,
    interpolation: Interpolation,
) -> Result<ManifoldGraph> {
    if grid.dims() != n {
        return Err(ManifoldError::Invalid(format!("grid has {} axes, cut is {n}", grid.dims())));
    }
    let nodes = grid.nodes();
    let out: Vec<(Vec<f64>, PointLog)> = nodes
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            point_value(model, n, x, opts, i).map_err(|e| ManifoldError::PointFailed { index: i, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    let (values, log): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    let lipschitz_est = pairwise_lipschitz(&nodes, &values);
    Ok(ManifoldGraph {
        n,
        modes: model.dim(),
        grid: grid.clone(),
        values,
        interpolation,
        lipschitz_est,
        method: opts.method(),
        log,
    })
}

fn catmull_rom(t: f64) -> [f64; 4] {
    let (t2, t3) = (t * t, t * t * t);
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

impl ManifoldGraph {
    /// Per-axis `(node index, weight)` stencils for `x`.
    fn stencils(&self, x: &[f64]) -> Result<Vec<Vec<(usize, f64)>>> {
        let g = &self.grid;
        if x.len() != g.dims() {
            return Err(ManifoldError::Invalid(format!("query has {} coordinates", x.len())));
        }
        let mut out = Vec::with_capacity(g.dims());
        for d in 0..g.dims() {
            let p = g.points[d];
            let s = (x[d] - g.lo[d]) / g.step(d);
            if !(s >= -1e-9 && s <= (p - 1) as f64 + 1e-9) {
                return Err(ManifoldError::OutsideHull { point: x.to_vec() });
            }
            let i = (s.floor().max(0.0) as usize).min(p - 2);
            let t = (s - i as f64).clamp(0.0, 1.0);
            let mut st: Vec<(usize, f64)> = Vec::new();
            match self.interpolation {
                Interpolation::Multilinear => {
                    st.push((i, 1.0 - t));
                    st.push((i + 1, t));
                }
                Interpolation::Cubic => {
                    let w = catmull_rom(t);
                    for (k, wk) in w.iter().enumerate() {
                        let j = i as i64 - 1 + k as i64;
                        if j < 0 {
                            st.push((0, 2.0 * wk));
                            st.push((1, -wk));
                        } else if j as usize >= p {
                            st.push((p - 1, 2.0 * wk));
                            st.push((p - 2, -wk));
                        } else {
                            st.push((j as usize, *wk));
                        }
                    }
                }
            }
            out.push(st);
        }
        Ok(out)
    }

    /// `Φ(x)`; fails outside the grid box.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let st = self.stencils(x)?;
        let mut acc = vec![0.0; self.modes - self.n];
        let mut idx = vec![0usize; st.len()];
        loop {
            let mut w = 1.0;
            let mut node = Vec::with_capacity(st.len());
            for (d, &k) in idx.iter().enumerate() {
                w *= st[d][k].1;
                node.push(st[d][k].0);
            }
            if w != 0.0 {
                let v = &self.values[self.grid.flat(&node)];
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += w * b;
                }
            }
            let mut d = st.len();
            loop {
                if d == 0 {
                    return Ok(acc);
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < st[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// `x + Φ(x)` as a full state.
    pub fn lift(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut u = x.to_vec();
        u.extend(self.eval(x)?);
        Ok(u)
    }

    /// `‖Q u - Φ(P u)‖`.
    pub fn vertical_distance(&self, u: &[f64]) -> Result<f64> {
        let phi = self.eval(&u[..self.n])?;
        Ok(dist(&u[self.n..], &phi))
    }

    pub fn nodes(&self) -> Vec<Vec<f64>> {
        self.grid.nodes()
    }

    pub fn max_value_norm(&self) -> f64 {
        self.values.iter().map(|v| norm(v)).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| ManifoldError::Json(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: ManifoldGraph = serde_json::from_str(s).map_err(|e| ManifoldError::Json(e.to_string()))?;
        if g.values.len() != g.grid.len() || g.values.iter().any(|v| v.len() != g.modes - g.n) {
            return Err(ManifoldError::Json("values do not match the grid".into()));
        }
        Ok(g)
    }
}
