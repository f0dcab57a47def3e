//! Arithmetic in the eigenbasis of a positive self-adjoint operator `A`.
//!
//! A state is the coefficient vector `(u_1, ..., u_M)` of `u` in the eigenbasis,
//! stored densely as `&[f64]`. The cut index `n` always counts low modes, so
//! `P_n` keeps indices `0..n` and `λ_n`, `λ_{n+1}` are `values[n-1]`, `values[n]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("spectrum needs at least 2 eigenvalues, got {0}")]
    TooShort(usize),
    #[error("eigenvalue {index} = {value} is not positive")]
    NonPositive { index: usize, value: f64 },
    #[error("eigenvalues not sorted at index {0}")]
    NotSorted(usize),
    #[error("{0} labels for {1} eigenvalues")]
    LabelCount(usize, usize),
    #[error("cut index {n} out of range 1..={max}")]
    IndexOutOfRange { n: usize, max: usize },
    #[error("shell half-width {k} must be below lambda_N = {lambda_n}")]
    ShellTooWide { k: f64, lambda_n: f64 },
    #[error("negative time {0}")]
    NegativeTime(f64),
}

pub type Result<T> = std::result::Result<T, SpectralError>;

/// Nondecreasing positive eigenvalues, counted with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    labels: Option<Vec<String>>,
    source: String,
}

impl Spectrum {
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(SpectralError::TooShort(values.len()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SpectralError::NonPositive { index: i, value: v });
            }
            if i > 0 && v < values[i - 1] {
                return Err(SpectralError::NotSorted(i));
            }
        }
        Ok(Self { values, labels: None, source: source.into() })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.values.len() {
            return Err(SpectralError::LabelCount(labels.len(), self.values.len()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// First `m` eigenvalues (labels kept).
    pub fn truncate(&self, m: usize) -> Result<Self> {
        let m = m.min(self.len());
        let mut s = Spectrum::new(self.values[..m].to_vec(), self.source.clone())?;
        if let Some(l) = &self.labels {
            s.labels = Some(l[..m].to_vec());
        }
        Ok(s)
    }

    /// Distinct levels with their multiplicities, in increasing order.
    pub fn levels(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            match out.last_mut() {
                Some((w, c)) if *w == v => *c += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    fn check_cut(&self, n: usize, max: usize) -> Result<()> {
        if n == 0 || n > max {
            return Err(SpectralError::IndexOutOfRange { n, max });
        }
        Ok(())
    }

    /// Constants of the exponential dichotomy for `A - α` at cut `n`.
    pub fn dichotomy(&self, n: usize) -> Result<Dichotomy> {
        self.check_cut(n, self.len() - 1)?;
        let (a, b) = (self.values[n - 1], self.values[n]);
        Ok(Dichotomy { n, alpha: 0.5 * (a + b), theta: 0.5 * (b - a) })
    }
}

/// `α = (λ_N + λ_{N+1})/2` and `θ = (λ_{N+1} - λ_N)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dichotomy {
    pub n: usize,
    pub alpha: f64,
    pub theta: f64,
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

pub fn dist(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `(Σ λ_n^s u_n²)^{1/2}`.
pub fn sobolev_norm(spec: &Spectrum, u: &[f64], s: f64) -> f64 {
    assert_eq!(u.len(), spec.len(), "state/spectrum length mismatch");
    if s == 0.0 {
        return norm(u);
    }
    spec.values.iter().zip(u).map(|(l, x)| l.powf(s) * x * x).sum::<f64>().sqrt()
}

/// `P_n u`: keeps the first `n` coefficients.
pub fn project_low(u: &[f64], n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > u.len() {
        return Err(SpectralError::IndexOutOfRange { n, max: u.len() });
    }
    let mut out = u.to_vec();
    out[n..].iter_mut().for_each(|x| *x = 0.0);
    Ok(out)
}

/// `Q_n u = u - P_n u`.
pub fn project_high(u: &[f64], n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > u.len() {
        return Err(SpectralError::IndexOutOfRange { n, max: u.len() });
    }
    let mut out = u.to_vec();
    out[..n].iter_mut().for_each(|x| *x = 0.0);
    Ok(out)
}

/// Index sets (0-based) of the three shell projectors around the cut `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellSplit {
    /// `λ < λ_N - k`
    pub low: Vec<usize>,
    /// `λ_N - k ≤ λ ≤ λ_{N+1} + k`
    pub shell: Vec<usize>,
    /// `λ > λ_{N+1} + k`
    pub high: Vec<usize>,
}

pub fn shell_projector(spec: &Spectrum, n: usize, k: f64) -> Result<ShellSplit> {
    spec.check_cut(n, spec.len() - 1)?;
    let (ln, ln1) = (spec.values[n - 1], spec.values[n]);
    if k >= ln {
        return Err(SpectralError::ShellTooWide { k, lambda_n: ln });
    }
    let mut out = ShellSplit { low: vec![], shell: vec![], high: vec![] };
    for (i, &l) in spec.values.iter().enumerate() {
        if l < ln - k {
            out.low.push(i);
        } else if l <= ln1 + k {
            out.shell.push(i);
        } else {
            out.high.push(i);
        }
    }
    Ok(out)
}

/// `V(u) = ‖Q_n u‖² - ‖P_n u‖²`; `u` lies in the cone `K⁺` iff this is `≤ 0`.
pub fn cone_value(u: &[f64], n: usize) -> f64 {
    let n = n.min(u.len());
    let p: f64 = u[..n].iter().map(|x| x * x).sum();
    let q: f64 = u[n..].iter().map(|x| x * x).sum();
    q - p
}

/// `e^{-At} u`, coefficientwise.
pub fn semigroup_apply(spec: &Spectrum, u: &[f64], t: f64) -> Result<Vec<f64>> {
    if t < 0.0 {
        return Err(SpectralError::NegativeTime(t));
    }
    assert_eq!(u.len(), spec.len(), "state/spectrum length mismatch");
    Ok(spec.values.iter().zip(u).map(|(l, x)| x * (-l * t).exp()).collect())
}

/// Unit vector `e_i` (0-based) of length `m`.
pub fn basis(m: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; m];
    e[i] = 1.0;
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sq(m: usize) -> Spectrum {
        Spectrum::new((1..=m).map(|n| (n * n) as f64).collect(), "test").unwrap()
    }

    #[test]
    fn rejects_bad_spectra() {
        assert!(matches!(Spectrum::new(vec![1.0], "x"), Err(SpectralError::TooShort(1))));
        assert!(Spectrum::new(vec![0.0, 1.0], "x").is_err());
        assert!(matches!(Spectrum::new(vec![2.0, 1.0], "x"), Err(SpectralError::NotSorted(1))));
        assert!(Spectrum::new(vec![1.0, 1.0], "x").is_ok());
    }

    #[test]
    fn sobolev_single_mode() {
        let s = Spectrum::new(vec![2.0, 3.0], "x").unwrap();
        assert_relative_eq!(sobolev_norm(&s, &[1.0, 0.0], 2.0), 2.0, epsilon = 1e-15);
        let s = Spectrum::new(vec![1.0, 4.0], "x").unwrap();
        assert_relative_eq!(sobolev_norm(&s, &[1.0, 1.0], -1.0), 1.25f64.sqrt(), epsilon = 1e-15);
        assert_eq!(sobolev_norm(&s, &[3.0, 4.0], 0.0), 5.0);
    }

    #[test]
    fn projections() {
        let u = [1.0, 2.0, 3.0];
        assert_eq!(project_low(&u, 2).unwrap(), vec![1.0, 2.0, 0.0]);
        assert_eq!(project_high(&u, 2).unwrap(), vec![0.0, 0.0, 3.0]);
        assert_eq!(project_low(&u, 3).unwrap(), u.to_vec());
        assert!(project_low(&u, 0).is_err());
        assert!(project_high(&u, 4).is_err());
    }

    #[test]
    fn shell_example() {
        let s = sq(4);
        let sh = shell_projector(&s, 2, 2.0).unwrap();
        assert_eq!(sh.low, vec![0]);
        assert_eq!(sh.shell, vec![1, 2]);
        assert_eq!(sh.high, vec![3]);
        let thin = shell_projector(&s, 2, 1e-9).unwrap();
        assert_eq!(thin.shell, vec![1, 2]);
        assert!(matches!(shell_projector(&s, 2, 4.0), Err(SpectralError::ShellTooWide { .. })));
    }

    #[test]
    fn cone_examples() {
        assert_eq!(cone_value(&[1.0, 0.0], 1), -1.0);
        assert_eq!(cone_value(&[1.0, 1.0], 1), 0.0);
        assert_eq!(cone_value(&[0.0, 1.0], 1), 1.0);
    }

    #[test]
    fn semigroup_examples() {
        let s = sq(3);
        let u = [1.0, 0.5, -2.0];
        assert_eq!(semigroup_apply(&s, &u, 0.0).unwrap(), u.to_vec());
        let v = semigroup_apply(&s, &[1.0, 0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(v[0], (-1.0f64).exp(), epsilon = 1e-16);
        assert!(matches!(semigroup_apply(&s, &u, -1.0), Err(SpectralError::NegativeTime(_))));
    }

    #[test]
    fn levels_and_dichotomy() {
        let s = Spectrum::new(vec![2.0, 2.0, 2.0, 6.0, 6.0], "x").unwrap();
        assert_eq!(s.levels(), vec![(2.0, 3), (6.0, 2)]);
        let d = sq(4).dichotomy(2).unwrap();
        assert_eq!((d.alpha, d.theta), (6.5, 2.5));
        assert!(sq(4).dichotomy(4).is_err());
    }
}
