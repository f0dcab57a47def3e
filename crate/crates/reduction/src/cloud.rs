use crate::{ReductionError, Result};
use serde::{Deserialize, Serialize};
use spectral_core::Spectrum;

/// Finite sample of a compact set. Distances are Euclidean in the stored
/// coordinates; [`PointCloud::in_sobolev`] rescales coefficients so that
/// they become `H^s` distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    /// `s` of the ambient `H^s` norm the coordinates were scaled for
    pub sobolev_s: f64,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or(ReductionError::Empty)?.len();
        if let Some(p) = points.iter().find(|p| p.len() != first) {
            return Err(ReductionError::Ragged(first, p.len()));
        }
        Ok(Self { points, sobolev_s: 0.0 })
    }

    /// Coefficients `u_n ↦ λ_n^{s/2} u_n`.
    pub fn in_sobolev(points: &[Vec<f64>], spec: &Spectrum, s: f64) -> Result<Self> {
        let w: Vec<f64> = spec.values().iter().map(|l| l.powf(s / 2.0)).collect();
        let scaled = points
            .iter()
            .map(|p| {
                if p.len() != w.len() {
                    return Err(ReductionError::Ragged(w.len(), p.len()));
                }
                Ok(p.iter().zip(&w).map(|(a, b)| a * b).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let mut c = Self::new(scaled)?;
        c.sobolev_s = s;
        Ok(c)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        spectral_core::dist(&self.points[i], &self.points[j])
    }

    /// Applies `f` to every point.
    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        Self::new(self.points.iter().map(|p| f(p)).collect())
    }
}
