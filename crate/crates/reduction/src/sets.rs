//! Synthetic clouds reproducing the extremal constructions for doubling and
//! log-doubling dimensions.

use crate::{PointCloud, Result};

/// `K = ∪ ε_n[-1,1] e_n`, `n = 1..=eps.len()`. Each segment carries
/// `pts_per_seg` evenly spaced points, and segment `k` additionally contains
/// `±ε_m e_k` for every `m ≥ k`, so that the ball `B(ε_m, 0)` sees exactly
/// the `m` orthogonal directions.
pub fn orthogonal_segments_set(eps: &[f64], pts_per_seg: usize) -> Result<PointCloud> {
    let m = eps.len();
    let mut pts = vec![vec![0.0; m]];
    for (k, &ek) in eps.iter().enumerate() {
        let mut coords: Vec<f64> = Vec::new();
        if pts_per_seg >= 2 {
            coords.extend((0..pts_per_seg).map(|j| ek * (2.0 * j as f64 / (pts_per_seg - 1) as f64 - 1.0)));
        }
        for &em in &eps[k..] {
            coords.push(em);
            coords.push(-em);
        }
        coords.sort_by(f64::total_cmp);
        coords.dedup();
        for c in coords.into_iter().filter(|c| *c != 0.0) {
            let mut p = vec![0.0; m];
            p[k] = c;
            pts.push(p);
        }
    }
    PointCloud::new(pts)
}

/// Scaled vertex sets `ε_n {0,1}^n`, each in its own block of coordinates and
/// sharing the origin. Returns the cloud and, per `n`, the index range of its
/// vertices (the origin is index 0 and belongs to every cube).
pub fn cube_vertices_set(eps: &[f64]) -> Result<(PointCloud, Vec<Vec<usize>>)> {
    let dim: usize = (1..=eps.len()).sum();
    let mut pts = vec![vec![0.0; dim]];
    let mut members = Vec::with_capacity(eps.len());
    let mut offset = 0;
    for (i, &e) in eps.iter().enumerate() {
        let n = i + 1;
        let mut idx = vec![0];
        for mask in 1u64..(1u64 << n) {
            let mut p = vec![0.0; dim];
            for b in 0..n {
                if mask >> b & 1 == 1 {
                    p[offset + b] = e;
                }
            }
            idx.push(pts.len());
            pts.push(p);
        }
        members.push(idx);
        offset += n;
    }
    Ok((PointCloud::new(pts)?, members))
}

/// `log n / log log ε_n^{-1}` for the orthogonal-segments family.
pub fn toostr_ratio(n: f64, log_inv_eps: f64) -> f64 {
    n.ln() / log_inv_eps.ln()
}

/// `n / (log n · log log ε_n^{-1})` for the cube family.
pub fn cube_good_ratio(n: f64, log_inv_eps: f64) -> f64 {
    n / (n.ln() * log_inv_eps.ln())
}

/// `points` equispaced samples of the segment `[0,1] e_1` in `R^m`.
pub fn segment_cloud(points: usize, m: usize) -> Result<PointCloud> {
    PointCloud::new(
        (0..points)
            .map(|i| {
                let mut p = vec![0.0; m];
                p[0] = i as f64 / (points.max(2) - 1) as f64;
                p
            })
            .collect(),
    )
}

/// Regular `side × side` grid on the unit square.
pub fn square_cloud(side: usize) -> Result<PointCloud> {
    let h = 1.0 / (side.max(2) - 1) as f64;
    PointCloud::new((0..side * side).map(|k| vec![(k / side) as f64 * h, (k % side) as f64 * h]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_blocks_have_two_to_the_n_vertices() {
        let (c, m) = cube_vertices_set(&[0.5, 0.25, 0.125]).unwrap();
        assert_eq!(c.dim(), 6);
        assert_eq!(m.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 4, 8]);
        assert_eq!(c.len(), 1 + 1 + 3 + 7);
    }

    #[test]
    fn segments_contain_the_radius_points() {
        let eps = [1.0, 0.5, 0.25];
        let c = orthogonal_segments_set(&eps, 3).unwrap();
        for k in 0..3 {
            for &e in &eps[k..] {
                assert!(c.points().iter().any(|p| p[k] == e));
            }
        }
    }
}
