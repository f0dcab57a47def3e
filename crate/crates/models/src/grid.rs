//! Collocation grids.
//!
//! `SineGrid` is the Dirichlet grid on `[0, π]` with eigenfunctions
//! `√(2/π) sin(nx)`; `TorusGrid` is the periodic grid on `[0, 2π)^d` with complex
//! Fourier coefficients in the orthonormal basis `e^{ip·x}/(2π)^{d/2}`.

use crate::{ModelError, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Interior points `x_j = jπ/(J+1)`, `j = 1..J`, with the orthonormal DST-I matrix.
#[derive(Debug, Clone)]
pub struct SineGrid {
    modes: usize,
    points: usize,
    /// row-major `J × M`, `S_{jn} = √(2/(J+1)) sin(n j π/(J+1))`
    s: Vec<f64>,
    scale: f64,
}

impl SineGrid {
    /// `points > modes` is required for the transform to be invertible on band-limited states.
    pub fn new(modes: usize, points: usize) -> Result<Self> {
        if points <= modes {
            return Err(ModelError::GridTooCoarse { points, modes });
        }
        let j1 = (points + 1) as f64;
        let c = (2.0 / j1).sqrt();
        let mut s = vec![0.0; points * modes];
        for j in 0..points {
            for n in 0..modes {
                s[j * modes + n] = c * (((n + 1) * (j + 1)) as f64 * PI / j1).sin();
            }
        }
        Ok(Self { modes, points, s, scale: (j1 / PI).sqrt() })
    }

    /// Grid twice as fine as the Galerkin truncation, exact for cubic products.
    pub fn dealiased(modes: usize) -> Self {
        Self::new(modes, 2 * modes).expect("2M > M")
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn x(&self, j: usize) -> f64 {
        (j + 1) as f64 * PI / (self.points + 1) as f64
    }

    /// Physical values `u(x_j)`.
    pub fn to_grid(&self, u: &[f64]) -> Vec<f64> {
        let m = self.modes;
        (0..self.points)
            .map(|j| self.scale * self.s[j * m..(j + 1) * m].iter().zip(u).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    /// Discrete `L²` projection of grid values onto the first `M` eigenfunctions.
    pub fn from_grid(&self, g: &[f64]) -> Vec<f64> {
        let m = self.modes;
        let mut out = vec![0.0; m];
        for (j, gj) in g.iter().enumerate() {
            let row = &self.s[j * m..(j + 1) * m];
            for n in 0..m {
                out[n] += row[n] * gj;
            }
        }
        out.iter_mut().for_each(|x| *x /= self.scale);
        out
    }

    /// `√(πJ/(J+1))`: bound of `‖from_grid(g)‖` per unit of `sup|g|`.
    pub fn sup_to_h(&self) -> f64 {
        (PI * self.points as f64 / (self.points + 1) as f64).sqrt()
    }
}

/// Integer wave vector on a torus grid.
pub type Lattice = [i64; 3];

/// `n^d` equispaced points on `[0, 2π)^d`, `d ∈ {1, 2, 3}`.
#[derive(Clone)]
pub struct TorusGrid {
    d: usize,
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TorusGrid(d={}, n={})", self.d, self.n)
    }
}

impl TorusGrid {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if !(1..=3).contains(&d) || n < 2 {
            return Err(ModelError::Invalid(format!("torus grid d={d}, n={n}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { d, n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical coordinates of flat index `i`.
    pub fn point(&self, i: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        let mut r = i;
        let h = 2.0 * PI / self.n as f64;
        for a in (0..self.d).rev() {
            x[a] = (r % self.n) as f64 * h;
            r /= self.n;
        }
        x
    }

    /// Wave vector of flat index `i`, components in `[-n/2, n/2)`.
    pub fn wavevector(&self, i: usize) -> Lattice {
        let mut p = [0i64; 3];
        let mut r = i;
        let n = self.n as i64;
        for a in (0..self.d).rev() {
            let k = (r % self.n) as i64;
            p[a] = if k >= (n + 1) / 2 { k - n } else { k };
            r /= self.n;
        }
        p
    }

    /// Flat index of a wave vector, if it is resolved by the grid.
    pub fn index_of(&self, p: Lattice) -> Option<usize> {
        let n = self.n as i64;
        let mut i = 0usize;
        for (a, &pa) in p.iter().enumerate() {
            if a >= self.d {
                if pa != 0 {
                    return None;
                }
                continue;
            }
            if pa < -(n / 2) || pa >= (n + 1) / 2 {
                return None;
            }
            i = i * self.n + pa.rem_euclid(n) as usize;
        }
        Some(i)
    }

    fn fft_axes(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.d {
            let stride = n.pow((self.d - 1 - axis) as u32);
            let total = self.len();
            for start in 0..total {
                if (start / stride) % n != 0 {
                    continue;
                }
                for k in 0..n {
                    buf[k] = data[start + k * stride];
                }
                plan.process(&mut buf);
                for k in 0..n {
                    data[start + k * stride] = buf[k];
                }
            }
        }
    }

    /// Orthonormal-basis coefficients of real grid values.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft_axes(&mut data, false);
        let s = (2.0 * PI).powf(self.d as f64 / 2.0) / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= s);
        data
    }

    /// Grid values (complex) of orthonormal-basis coefficients.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut data = coeffs.to_vec();
        self.fft_axes(&mut data, true);
        let s = (2.0 * PI).powf(-(self.d as f64) / 2.0);
        data.iter_mut().for_each(|c| *c *= s);
        data
    }

    /// Real trigonometric polynomial from a list of `(p, c_p)`; the conjugate
    /// coefficient at `-p` is added automatically.
    pub fn synthesize(&self, terms: &[(Lattice, Complex64)]) -> Vec<f64> {
        let mut c = vec![Complex64::new(0.0, 0.0); self.len()];
        for &(p, cp) in terms {
            let i = self.index_of(p).expect("wave vector not resolved by grid");
            let neg = [-p[0], -p[1], -p[2]];
            let j = self.index_of(neg).expect("wave vector not resolved by grid");
            c[i] += cp;
            c[j] += cp.conj();
        }
        self.inverse(&c).iter().map(|z| z.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_round_trip() {
        let g = SineGrid::new(8, 12).unwrap();
        let u: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).cos()).collect();
        let back = g.from_grid(&g.to_grid(&u));
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(SineGrid::new(8, 8).is_err());
    }

    #[test]
    fn sine_values_match_eigenfunctions() {
        let g = SineGrid::new(4, 9).unwrap();
        let mut u = vec![0.0; 4];
        u[2] = 1.0;
        let vals = g.to_grid(&u);
        for (j, v) in vals.iter().enumerate() {
            let expect = (2.0 / PI).sqrt() * (3.0 * g.x(j)).sin();
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn torus_round_trip_and_norm() {
        for d in 1..=3 {
            let t = TorusGrid::new(d, 8).unwrap();
            let vals: Vec<f64> = (0..t.len()).map(|i| ((i * 7 % 13) as f64).sin()).collect();
            let c = t.forward(&vals);
            let back = t.inverse(&c);
            for (a, b) in vals.iter().zip(&back) {
                assert!((a - b.re).abs() < 1e-12 && b.im.abs() < 1e-12);
            }
            // Parseval: Σ|c|² = ∫|u|² = (2π/n)^d Σ u_j²
            let lhs: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            let rhs: f64 = vals.iter().map(|v| v * v).sum::<f64>() * (2.0 * PI / 8.0).powi(d as i32);
            assert!((lhs - rhs).abs() < 1e-10 * rhs);
        }
    }

    #[test]
    fn torus_wavevectors() {
        let t = TorusGrid::new(3, 6).unwrap();
        for i in 0..t.len() {
            assert_eq!(t.index_of(t.wavevector(i)), Some(i));
        }
        assert_eq!(t.index_of([3, 0, 0]), None);
        let cos = t.synthesize(&[([1, 0, 0], Complex64::new(0.5, 0.0))]);
        let s = (2.0 * PI).powf(-1.5);
        for i in 0..t.len() {
            assert!((cos[i] - s * t.point(i)[0].cos()).abs() < 1e-13);
        }
    }
}
