//! Spectral gap predicates and the lattice shell search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral_core::{SpectralError, Spectrum};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GapError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("smoothing exponent beta = {0} outside (-2, 0]")]
    BetaOutOfRange(f64),
    #[error("shell width k = {k} must exceed 4L = {four_l}")]
    ShellTooThin { k: f64, four_l: f64 },
    #[error("smoothness order k must be at least 1")]
    BadOrder,
}

pub type Result<T> = std::result::Result<T, GapError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// number of low modes
    pub n: usize,
    pub lambda_n: f64,
    pub lambda_n1: f64,
    pub gap: f64,
    pub theta: f64,
    /// shift of the operator, strictly between `λ_N` and `λ_{N+1}` when `gap > 0`
    pub alpha: f64,
    pub l: f64,
    pub beta: f64,
    /// left-hand side of the weighted condition, compared against `L`
    pub ratio: f64,
    pub holds: bool,
    /// `ratio == L` exactly; fails the strict predicate
    pub boundary: bool,
}

fn pair(spec: &Spectrum, n: usize) -> Result<(f64, f64)> {
    if n == 0 || n >= spec.len() {
        return Err(SpectralError::IndexOutOfRange { n, max: spec.len() - 1 }.into());
    }
    Ok((spec.values()[n - 1], spec.values()[n]))
}

/// `λ_{N+1} - λ_N > 2L`.
pub fn gap_condition(spec: &Spectrum, n: usize, l: f64) -> Result<GapReport> {
    let (a, b) = pair(spec, n)?;
    let gap = b - a;
    Ok(GapReport {
        n,
        lambda_n: a,
        lambda_n1: b,
        gap,
        theta: gap / 2.0,
        alpha: (a + b) / 2.0,
        l,
        beta: 0.0,
        ratio: gap / 2.0,
        holds: gap > 2.0 * l,
        boundary: gap == 2.0 * l,
    })
}

/// `(λ_{N+1} - λ_N)/(λ_{N+1}^{-β/2} + λ_N^{-β/2}) > L` for `F: H → H^β`.
pub fn gap_condition_beta(spec: &Spectrum, n: usize, l: f64, beta: f64) -> Result<GapReport> {
    if !(beta > -2.0 && beta <= 0.0) {
        return Err(GapError::BetaOutOfRange(beta));
    }
    let (a, b) = pair(spec, n)?;
    let gap = b - a;
    let (wa, wb) = (a.powf(-beta / 2.0), b.powf(-beta / 2.0));
    let ratio = gap / (wb + wa);
    let alpha = (b * wa + a * wb) / (wa + wb);
    Ok(GapReport {
        n,
        lambda_n: a,
        lambda_n1: b,
        gap,
        theta: gap / 2.0,
        alpha,
        l,
        beta,
        ratio,
        holds: ratio > l,
        boundary: ratio == l,
    })
}

/// `λ_{N+1} - kλ_N > √2 L (λ_{N+1}^{-β/2} + kλ_N^{-β/2})`, sufficient for a `C^k` manifold.
pub fn gap_condition_ck(spec: &Spectrum, n: usize, k: u32, l: f64, beta: f64) -> Result<bool> {
    if k == 0 {
        return Err(GapError::BadOrder);
    }
    if !(beta > -2.0 && beta <= 0.0) {
        return Err(GapError::BetaOutOfRange(beta));
    }
    let (a, b) = pair(spec, n)?;
    let k = k as f64;
    Ok(b - k * a > std::f64::consts::SQRT_2 * l * (b.powf(-beta / 2.0) + k * a.powf(-beta / 2.0)))
}

/// Cut indices between distinct eigenvalues (cuts inside a multiplicity class are skipped).
pub fn level_cuts(spec: &Spectrum) -> Vec<usize> {
    let v = spec.values();
    (1..v.len()).filter(|&n| v[n] > v[n - 1]).collect()
}

/// All distinct-level cuts satisfying [`gap_condition_beta`], at most `count` of them.
pub fn find_gaps(spec: &Spectrum, l: f64, beta: f64, count: usize) -> Result<Vec<GapReport>> {
    let mut out = Vec::new();
    for n in level_cuts(spec) {
        if out.len() >= count {
            break;
        }
        let r = gap_condition_beta(spec, n, l, beta)?;
        if r.holds {
            out.push(r);
        }
    }
    Ok(out)
}

/// Smallest distinct-level cut satisfying [`gap_condition_ck`].
pub fn find_ck_cut(spec: &Spectrum, k: u32, l: f64, beta: f64) -> Result<Option<usize>> {
    for n in level_cuts(spec) {
        if gap_condition_ck(spec, n, k, l, beta)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `(level, distance to next level)` for consecutive distinct eigenvalues.
pub fn level_gaps(spec: &Spectrum) -> Vec<(f64, f64)> {
    let lv = spec.levels();
    lv.windows(2).map(|w| (w[0].0, w[1].0 - w[0].0)).collect()
}

pub fn max_level_gap(spec: &Spectrum) -> f64 {
    level_gaps(spec).iter().map(|g| g.1).fold(0.0, f64::max)
}

/// Lattice points `p ∈ ℤ³` with `c - k ≤ |p|² ≤ c + k`.
pub fn shell_points(center: f64, k: f64) -> Vec<[i64; 3]> {
    let hi = center + k;
    if hi < 0.0 {
        return vec![];
    }
    let r = hi.sqrt().ceil() as i64;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let n2 = (a * a + b * b + c * c) as f64;
                if n2 >= center - k && n2 <= hi {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn ball_offsets(rho: f64) -> Vec<[i64; 3]> {
    let r = rho.floor() as i64;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let n2 = (a * a + b * b + c * c) as f64;
                if n2 > 0.0 && n2 <= rho * rho {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// `(C - C) ∩ B_ρ = {0}` for the shell `C` around `N + 1/2`.
pub fn shell_qualifies(n: u64, k: f64, rho: f64) -> bool {
    let center = n as f64 + 0.5;
    let offs = ball_offsets(rho);
    let (lo, hi) = (center - k, center + k);
    for p in shell_points(center, k) {
        for d in &offs {
            let q = [p[0] + d[0], p[1] + d[1], p[2] + d[2]];
            let n2 = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) as f64;
            if n2 >= lo && n2 <= hi {
                return false;
            }
        }
    }
    true
}

/// All `N ≤ n_max` whose shell has no nonzero differences of length `≤ ρ`.
pub fn shell_search(k: f64, rho: f64, n_max: u64) -> Vec<u64> {
    (1..=n_max).into_par_iter().filter(|&n| shell_qualifies(n, k, rho)).collect()
}

/// `2L²/(k - 4L) + δ < θ/2` and `α - 2L > 0`.
pub fn spatial_averaging_constants(theta: f64, l: f64, k: f64, delta: f64, alpha: f64) -> Result<bool> {
    if k <= 4.0 * l {
        return Err(GapError::ShellTooThin { k, four_l: 4.0 * l });
    }
    Ok(2.0 * l * l / (k - 4.0 * l) + delta < theta / 2.0 && alpha - 2.0 * l > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(m: usize) -> Spectrum {
        Spectrum::new((1..=m).map(|n| (n * n) as f64).collect(), "sq").unwrap()
    }

    #[test]
    fn basic_gap() {
        let s = Spectrum::new(vec![1.0, 4.0], "x").unwrap();
        let r = gap_condition(&s, 1, 1.0).unwrap();
        assert!(r.holds && !r.boundary);
        assert_eq!((r.theta, r.alpha), (1.5, 2.5));
        let r = gap_condition(&s, 1, 1.5).unwrap();
        assert!(!r.holds && r.boundary);
        assert!(gap_condition(&s, 2, 1.0).is_err());
    }

    #[test]
    fn beta_range_and_burgers() {
        let s = sq(30);
        assert!(matches!(gap_condition_beta(&s, 1, 1.0, -2.0), Err(GapError::BetaOutOfRange(_))));
        assert!(gap_condition_beta(&s, 1, 1.0, 0.1).is_err());
        for n in 1..30 {
            let r = gap_condition_beta(&s, n, 0.5, -1.0).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ks_beta() {
        let s = Spectrum::new(vec![2.0, 17.0, 82.0, 257.0, 626.0], "ks").unwrap();
        let r = gap_condition_beta(&s, 3, 1.0, -0.5).unwrap();
        let want = 175.0 / (257f64.powf(0.25) + 82f64.powf(0.25));
        assert!((r.ratio - want).abs() < 1e-12);
        assert!(r.ratio > 18.0 && r.ratio < 2.0 * 18.0);
    }

    #[test]
    fn ck_examples() {
        let s = sq(200);
        for n in 3..200 {
            assert!(!gap_condition_ck(&s, n, 2, 0.1, 0.0).unwrap());
        }
        // k = 1 needs gap > 2√2 L, stricter than gap > 2L
        let t = Spectrum::new(vec![1.0, 6.0], "x").unwrap();
        assert!(gap_condition(&t, 1, 2.0).unwrap().holds);
        assert!(!gap_condition_ck(&t, 1, 1, 2.0, 0.0).unwrap());
        assert!(gap_condition_ck(&t, 1, 1, 1.7, 0.0).unwrap());
    }

    #[test]
    fn squares_find_gaps() {
        let s = sq(50);
        let n: Vec<usize> = find_gaps(&s, 3.0, 0.0, usize::MAX).unwrap().iter().map(|r| r.n).collect();
        assert_eq!(n, (3..50).collect::<Vec<_>>());
        assert_eq!(find_gaps(&s, 3.0, 0.0, 4).unwrap().len(), 4);
    }

    #[test]
    fn averaging_constants() {
        assert!(spatial_averaging_constants(2.0, 0.1, 1.0, 0.5, 1.0).unwrap());
        assert!(spatial_averaging_constants(2.0, 0.0, 1.0, 0.99, 1e-9).unwrap());
        assert!(!spatial_averaging_constants(2.0, 0.0, 1.0, 1.0, 1.0).unwrap());
        assert!(!spatial_averaging_constants(2.0, 0.1, 100.0, 1.0, 1.0).unwrap());
        assert!(spatial_averaging_constants(2.0, 0.25, 1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn shell_trivial_cases() {
        // shell covering everything contains unit steps
        assert!(!shell_qualifies(10, 1000.0, 1.0));
        for n in 1..50 {
            assert!(shell_qualifies(n, 2.0, 0.9));
        }
        let pts = shell_points(7.5, 0.4);
        assert!(pts.is_empty());
        assert_eq!(shell_points(1.5, 0.6).len(), 18);
    }
}
