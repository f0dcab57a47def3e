//! Spatial averaging on torus grids.
//!
//! Torus states are passed as real grid values; shell vectors `v` as
//! orthonormal-basis Fourier coefficients on the full grid.

use crate::grid::TorusGrid;
use num_complex::Complex64;

/// Default exponent in the spatial averaging condition; must stay below 1/4.
pub const KAPPA_DEFAULT: f64 = 0.125;

/// `a(u) = ⟨f'_u(x, u(x))⟩`, the mean over the torus.
pub fn spatial_average_multiplier(
    u_values: &[f64],
    f_prime: &dyn Fn([f64; 3], f64) -> f64,
    grid: &TorusGrid,
) -> f64 {
    let s: f64 = u_values.iter().enumerate().map(|(i, &u)| f_prime(grid.point(i), u)).sum();
    s / grid.len() as f64
}

/// Keeps coefficients with `lo ≤ |p|² ≤ hi`.
pub fn restrict_to_band(coeffs: &[Complex64], lo: f64, hi: f64, grid: &TorusGrid) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let p = grid.wavevector(i);
            let n2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) as f64;
            if n2 >= lo && n2 <= hi {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// `‖P̄(w P̄v) - a(u) P̄v‖` with `w = f'_u(x, u(x))` and `P̄` the shell
/// `λ_N - k ≤ |p|² ≤ λ_{N+1} + k`.
pub fn spatial_averaging_defect(
    u_values: &[f64],
    v_hat: &[Complex64],
    lambda_n: f64,
    lambda_n1: f64,
    k: f64,
    f_prime: &dyn Fn([f64; 3], f64) -> f64,
    grid: &TorusGrid,
) -> f64 {
    let (lo, hi) = (lambda_n - k, lambda_n1 + k);
    let pv = restrict_to_band(v_hat, lo, hi, grid);
    let a = spatial_average_multiplier(u_values, f_prime, grid);
    let vx = grid.inverse(&pv);
    let prod: Vec<Complex64> = vx
        .iter()
        .enumerate()
        .map(|(i, z)| z * f_prime(grid.point(i), u_values[i]))
        .collect();
    let mut fwd = forward_complex(grid, &prod);
    fwd = restrict_to_band(&fwd, lo, hi, grid);
    fwd.iter().zip(&pv).map(|(x, y)| (x - a * y).norm_sqr()).sum::<f64>().sqrt()
}

fn forward_complex(grid: &TorusGrid, vals: &[Complex64]) -> Vec<Complex64> {
    let re: Vec<f64> = vals.iter().map(|z| z.re).collect();
    let im: Vec<f64> = vals.iter().map(|z| z.im).collect();
    let a = grid.forward(&re);
    let b = grid.forward(&im);
    a.iter().zip(&b).map(|(x, y)| x + Complex64::new(0.0, 1.0) * y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Lattice;

    fn sample_u(grid: &TorusGrid) -> Vec<f64> {
        grid.synthesize(&[
            ([1, 0, 0], Complex64::new(0.6, 0.1)),
            ([0, 1, 1], Complex64::new(-0.3, 0.2)),
            ([0, 0, 1], Complex64::new(0.25, 0.0)),
        ])
    }

    #[test]
    fn constant_multiplier() {
        let g = TorusGrid::new(3, 8).unwrap();
        let u = sample_u(&g);
        assert!((spatial_average_multiplier(&u, &|_, _| 2.5, &g) - 2.5).abs() < 1e-14);
        let zero = vec![0.0; g.len()];
        assert!(spatial_average_multiplier(&zero, &|x, _| x[0].cos(), &g).abs() < 1e-14);
    }

    #[test]
    fn multiplier_matches_refined_grid() {
        let fp = |_x: [f64; 3], u: f64| 1.0 / (1.0 + u * u);
        let coarse = TorusGrid::new(3, 24).unwrap();
        let fine = TorusGrid::new(3, 48).unwrap();
        let a = spatial_average_multiplier(&sample_u(&coarse), &fp, &coarse);
        let b = spatial_average_multiplier(&sample_u(&fine), &fp, &fine);
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn scalar_derivative_has_no_defect() {
        let g = TorusGrid::new(3, 12).unwrap();
        let u = sample_u(&g);
        let v: Vec<Complex64> = (0..g.len()).map(|i| Complex64::new((i as f64).sin(), 0.0)).collect();
        let d = spatial_averaging_defect(&u, &v, 4.0, 5.0, 1.0, &|_, _| 3.0, &g);
        assert!(d < 1e-12);
        // v outside the shell
        let mut w = vec![Complex64::new(0.0, 0.0); g.len()];
        w[g.index_of([1, 0, 0]).unwrap()] = Complex64::new(1.0, 0.0);
        let d = spatial_averaging_defect(&u, &w, 9.0, 10.0, 1.0, &|_, u| u * u, &g);
        assert!(d < 1e-14);
    }

    #[test]
    fn defect_matches_explicit_convolution() {
        // f'_u = u², so w is a trigonometric polynomial of degree 2 in each axis
        let g = TorusGrid::new(3, 16).unwrap();
        let u = sample_u(&g);
        let fp = |_x: [f64; 3], u: f64| u * u;
        let w: Vec<f64> = u.iter().map(|x| x * x).collect();
        let w_hat = g.forward(&w);
        let (lo, hi) = (3.0, 6.0);
        let mut v = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut shell: Vec<Lattice> = Vec::new();
        for i in 0..g.len() {
            let p = g.wavevector(i);
            let n2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) as f64;
            if n2 >= lo && n2 <= hi {
                shell.push(p);
                v[i] = Complex64::new(((i * 31) % 7) as f64 - 3.0, ((i * 17) % 5) as f64 - 2.0);
            }
        }
        let a = w_hat[0].re / (2.0 * std::f64::consts::PI).powf(1.5);
        // (w v)_p = (2π)^{-3/2} Σ_q ŵ_{p-q} v_q in the orthonormal normalisation
        let norm = (2.0 * std::f64::consts::PI).powf(-1.5);
        let mut sum = 0.0;
        for &p in &shell {
            let mut acc = Complex64::new(0.0, 0.0);
            for &q in &shell {
                let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
                if let Some(j) = g.index_of(d) {
                    acc += w_hat[j] * v[g.index_of(q).unwrap()] * norm;
                }
            }
            acc -= a * v[g.index_of(p).unwrap()];
            sum += acc.norm_sqr();
        }
        let oracle = sum.sqrt();
        let got = spatial_averaging_defect(&u, &v, lo, hi, 0.0, &fp, &g);
        assert!((got - oracle).abs() < 1e-10 * oracle.max(1.0), "{got} vs {oracle}");
    }
}
