use crate::{ReductionError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral_core::Spectrum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RomanovReport {
    pub pairs: usize,
    /// bounds of `|x - y|_{H²} / |x - y|_H`
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// `(L, smallest N with |Q_N(x-y)| ≤ L |P_N(x-y)| for all pairs)`, scanning `N = 1..M-1`
    pub qualifying: Vec<(f64, Option<usize>)>,
}

impl RomanovReport {
    pub fn any_qualifies(&self) -> bool {
        self.qualifying.iter().any(|q| q.1.is_some())
    }
}

/// Pairwise `H²/H` ratios and the spectral-projector test for a set of
/// coefficient vectors. `pairs` selects which differences to use; `None` takes
/// all pairs.
pub fn romanov_check(
    spec: &Spectrum,
    points: &[Vec<f64>],
    pairs: Option<&[(usize, usize)]>,
    l_candidates: &[f64],
) -> Result<RomanovReport> {
    let m = spec.len();
    if points.iter().any(|p| p.len() != m) {
        return Err(ReductionError::Ragged(m, points.iter().map(Vec::len).find(|&l| l != m).unwrap_or(0)));
    }
    let all: Vec<(usize, usize)>;
    let pairs = match pairs {
        Some(p) => p,
        None => {
            all = (0..points.len()).flat_map(|i| (i + 1..points.len()).map(move |j| (i, j))).collect();
            &all
        }
    };
    let lam = spec.values();
    // per pair: H/H² norms and cumulative low-mode energy
    let stats: Vec<(f64, f64, Vec<f64>)> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let w: Vec<f64> = points[i].iter().zip(&points[j]).map(|(a, b)| a - b).collect();
            let h: f64 = w.iter().map(|x| x * x).sum();
            if h == 0.0 {
                return None;
            }
            let h2: f64 = w.iter().zip(lam).map(|(x, l)| (l * x) * (l * x)).sum();
            let mut cum = Vec::with_capacity(m + 1);
            let mut acc = 0.0;
            cum.push(0.0);
            for x in &w {
                acc += x * x;
                cum.push(acc);
            }
            Some((h.sqrt(), h2.sqrt(), cum))
        })
        .collect();
    if stats.is_empty() {
        return Err(ReductionError::Invalid("no distinct pairs".into()));
    }
    let ratios = stats.iter().map(|s| s.1 / s.0);
    let ratio_min = ratios.clone().fold(f64::INFINITY, f64::min);
    let ratio_max = ratios.fold(0.0, f64::max);
    let qualifying = l_candidates
        .iter()
        .map(|&l| {
            let n = (1..m).find(|&n| {
                stats.iter().all(|(_, _, cum)| {
                    let low = cum[n];
                    let high = (cum[m] - low).max(0.0);
                    high.sqrt() <= l * low.sqrt() * (1.0 + 1e-12)
                })
            });
            (l, n)
        })
        .collect();
    Ok(RomanovReport { pairs: stats.len(), ratio_min, ratio_max, qualifying })
}
