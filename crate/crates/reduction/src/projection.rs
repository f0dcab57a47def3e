use crate::{line_fit, PointCloud, ReductionError, Result};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Orthogonal projector onto an `n`-dimensional subspace of `R^m`, stored by
/// an orthonormal basis (the rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projector {
    pub rows: Vec<Vec<f64>>,
}

impl Projector {
    /// Coordinates of `Px` in the row basis.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| spectral_core::dot(r, x)).collect()
    }

    /// `Px` as a vector of the ambient space.
    pub fn apply_ambient(&self, x: &[f64]) -> Vec<f64> {
        let c = self.apply(x);
        let mut out = vec![0.0; x.len()];
        for (r, ci) in self.rows.iter().zip(&c) {
            for (o, v) in out.iter_mut().zip(r) {
                *o += ci * v;
            }
        }
        out
    }

    /// `max |<r_i, r_j> - δ_ij|`
    pub fn orthonormality_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in self.rows.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                e = e.max((spectral_core::dot(a, b) - t).abs());
            }
        }
        e
    }
}

/// Gaussian `n × m` matrix orthonormalised by QR.
pub fn random_projector(m: usize, n: usize, seed: u64) -> Result<Projector> {
    if n == 0 || n > m {
        return Err(ReductionError::TargetTooLarge { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng));
    let q = g.qr().q();
    Ok(Projector { rows: (0..n).map(|j| q.column(j).iter().copied().collect()).collect() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    /// `θ` in `|x - y| ≲ C |Px - Py|^θ`
    pub exponent: f64,
    pub constant: f64,
    pub r2: f64,
    pub pairs_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionExperiment {
    pub n: usize,
    pub seed: u64,
    pub projector: Projector,
    /// `min |P(x - y)| / |x - y|` over distinct pairs
    pub margin: f64,
    pub holder: HolderFit,
}

/// Projects `cloud` with `seeds.len()` random rank-`n` projectors.
pub fn mane_experiment(cloud: &PointCloud, n: usize, seeds: &[u64]) -> Result<Vec<ProjectionExperiment>> {
    let pts = cloud.points();
    let pairs: Vec<(usize, usize)> =
        (0..pts.len()).flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j))).filter(|&(i, j)| cloud.dist(i, j) > 0.0).collect();
    if pairs.is_empty() {
        return Err(ReductionError::Invalid("cloud needs two distinct points".into()));
    }
    let d: Vec<f64> = pairs.iter().map(|&(i, j)| cloud.dist(i, j)).collect();
    let mut sorted = d.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    seeds
        .par_iter()
        .map(|&seed| {
            let p = random_projector(cloud.dim(), n, seed)?;
            let img: Vec<Vec<f64>> = pts.iter().map(|x| p.apply(x)).collect();
            let mut margin = f64::INFINITY;
            let (mut lx, mut ly) = (Vec::new(), Vec::new());
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let pd = spectral_core::dist(&img[i], &img[j]);
                margin = margin.min(pd / d[k]);
                if d[k] < median && pd > 0.0 {
                    lx.push(pd.ln());
                    ly.push(d[k].ln());
                }
            }
            let holder = if lx.len() >= 2 {
                let (a, b, r2) = line_fit(&lx, &ly);
                HolderFit { exponent: b, constant: a.exp(), r2, pairs_used: lx.len() }
            } else {
                HolderFit { exponent: f64::NAN, constant: f64::NAN, r2: 0.0, pairs_used: lx.len() }
            };
            Ok(ProjectionExperiment { n, seed, projector: p, margin, holder })
        })
        .collect()
}

/// Median fitted Hölder exponent across experiments.
pub fn median_exponent(runs: &[ProjectionExperiment]) -> f64 {
    let mut e: Vec<f64> = runs.iter().map(|r| r.holder.exponent).filter(|x| x.is_finite()).collect();
    if e.is_empty() {
        return f64::NAN;
    }
    e.sort_by(f64::total_cmp);
    e[e.len() / 2]
}

/// Share of experiments whose projection separates every pair.
pub fn injective_fraction(runs: &[ProjectionExperiment]) -> f64 {
    if runs.is_empty() {
        return 0.0;
    }
    runs.iter().filter(|r| r.margin > 0.0).count() as f64 / runs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_orthonormal_and_deterministic() {
        let a = random_projector(12, 4, 7).unwrap();
        assert!(a.orthonormality_error() < 1e-12);
        assert_eq!(a, random_projector(12, 4, 7).unwrap());
        assert_ne!(a, random_projector(12, 4, 8).unwrap());
        assert!(random_projector(3, 4, 0).is_err());
    }

    #[test]
    fn identity_rank_projection_is_isometric() {
        let c = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![-0.3, 2.0]]).unwrap();
        let r = mane_experiment(&c, 2, &[1, 2]).unwrap();
        for e in r {
            assert!((e.margin - 1.0).abs() < 1e-12);
        }
    }
}
