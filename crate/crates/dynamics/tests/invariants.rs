use dynamics::{dissipativity_probe, integrate, solve_saddle, weighted_norm, SaddleProblem};
use models::{saturated_rde_model, Model};
use proptest::prelude::*;
use spectral_core::{dist, norm, sobolev_norm, Spectrum};

fn model(m: usize) -> Model {
    saturated_rde_model(m, 1.5, 50.0).unwrap()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn differences_grow_at_most_like_lipschitz(
        u in prop::collection::vec(-2.0f64..2.0, 8),
        v in prop::collection::vec(-2.0f64..2.0, 8),
    ) {
        let m = model(8);
        let l = m.lipschitz();
        let lam1 = m.spectrum.values()[0];
        let a = integrate(&m, &u, 1.0, 1e-3).unwrap();
        let b = integrate(&m, &v, 1.0, 1e-3).unwrap();
        let d0 = dist(&u, &v);
        for (k, t) in a.times.iter().enumerate() {
            let d = dist(&a.states[k], &b.states[k]);
            prop_assert!(d <= ((l - lam1) * t).exp() * d0 * (1.0 + 1e-6) + 1e-12);
        }
    }

    #[test]
    fn differences_are_smoothed(
        u in prop::collection::vec(-2.0f64..2.0, 16),
        v in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let m = model(16);
        let l = m.lipschitz();
        let lmax = *m.spectrum.values().last().unwrap();
        let a = integrate(&m, &u, 1.0, 1e-3).unwrap();
        let b = integrate(&m, &v, 1.0, 1e-3).unwrap();
        let d0 = dist(&u, &v);
        for (k, t) in a.times.iter().enumerate().skip(1) {
            let h2 = sobolev_norm(&m.spectrum, &diff(&a.states[k], &b.states[k]), 2.0);
            let e = std::f64::consts::E;
            let bound = d0 * (1.0 / e + l * t * (l * t).exp() * (1.0 + (e * lmax * t).ln()) / e);
            prop_assert!(t * h2 <= bound * (1.0 + 1e-6), "t={t} {} {bound}", t * h2);
        }
    }

    #[test]
    fn saddle_solution_is_linear_in_forcing(
        s in -3.0f64..3.0,
        r in -3.0f64..3.0,
        seed in 0u64..1000,
    ) {
        let spec = Spectrum::new((1..=6).map(|n| (n * n) as f64).collect(), "sq").unwrap();
        let steps = 200;
        let f = |k: usize, i: usize, c: f64| (k as f64 * 0.05 + i as f64 + c).sin();
        let h1: Vec<Vec<f64>> = (0..=steps).map(|k| (0..6).map(|i| f(k, i, seed as f64)).collect()).collect();
        let h2: Vec<Vec<f64>> = (0..=steps).map(|k| (0..6).map(|i| f(k, i, 0.3 * seed as f64 + 1.0).powi(3)).collect()).collect();
        let mix: Vec<Vec<f64>> = h1.iter().zip(&h2).map(|(a, b)| a.iter().zip(b).map(|(x, y)| s * x + r * y).collect()).collect();
        let solve = |h: Vec<Vec<f64>>| solve_saddle(&SaddleProblem::new(&spec, 2, -5.0, 0.05, h).unwrap()).unwrap();
        let (a, b, c) = (solve(h1), solve(h2), solve(mix));
        for k in 0..=steps {
            for i in 0..6 {
                let want = s * a.states[k][i] + r * b.states[k][i];
                prop_assert!((c.states[k][i] - want).abs() <= 1e-12 * (1.0 + want.abs()));
            }
        }
    }
}

#[test]
fn etd2_is_second_order() {
    let m = model(8);
    let u0: Vec<f64> = (0..8).map(|i| 1.5 / (1.0 + i as f64)).collect();
    let reference = integrate(&m, &u0, 1.0, 1e-3 / 16.0).unwrap();
    let r = reference.last().to_vec();
    let errs: Vec<f64> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|dt| dist(integrate(&m, &u0, 1.0, *dt).unwrap().last(), &r))
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.3..4.8).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn absorbing_radius_is_uniform_in_truncation() {
    let starts = |m: usize| -> Vec<Vec<f64>> {
        (0..6).map(|j| (0..m).map(|i| if i < 8 { 3.0 * ((i + j) as f64).cos() } else { 0.0 }).collect()).collect()
    };
    let radii: Vec<f64> = [8usize, 16, 32]
        .iter()
        .map(|&m| dissipativity_probe(&model(m), &starts(m), 20.0, 1e-3).unwrap().c_star.sqrt())
        .collect();
    let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().cloned().fold(0.0, f64::max);
    assert!(hi > 0.0 && hi <= 1.2 * lo, "{radii:?}");
}

#[test]
fn saddle_solution_obeys_modewise_bound() {
    let spec = Spectrum::new((1..=6).map(|n| (n * n) as f64).collect(), "sq").unwrap();
    let steps = 400;
    let h: Vec<Vec<f64>> = (0..=steps)
        .map(|k| (0..6).map(|i| ((k as f64) * 0.03 * (i + 1) as f64).cos() / (i + 1) as f64).collect())
        .collect();
    let p = SaddleProblem::new(&spec, 2, -10.0, 0.05, h.clone()).unwrap();
    let sol = solve_saddle(&p).unwrap();
    let sup: Vec<f64> = (0..6).map(|i| h.iter().map(|r| r[i].abs()).fold(0.0, f64::max)).collect();
    let bound = norm(&sup) / p.theta;
    for u in &sol.states {
        assert!(norm(u) <= bound * (1.0 + 1e-9));
    }
    let w = weighted_norm(&sol, 0.5, 0.0);
    assert!(w > 0.0 && w.is_finite());
}
