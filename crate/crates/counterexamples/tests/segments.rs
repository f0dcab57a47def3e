use counterexamples::*;
use reduction::{doubling_factor_at, PointCloud};
use spectral_core::Spectrum;

fn linear(m: usize) -> Spectrum {
    Spectrum::new((1..=m).map(|n| n as f64).collect(), "λ_n = n").unwrap()
}

#[test]
fn kick_centre_reaches_its_equilibrium() {
    let spec = linear(6);
    let mut p = SegmentsParams::standard(6);
    p.horizon = 20.0;
    let a = segments_attractor(&spec, &p).unwrap();
    for (i, w) in a.endpoints.iter().enumerate() {
        let want = p.b[i] / (i + 1) as f64;
        assert!((w[i] - want).abs() <= 1e-6 * want.max(1e-3), "n = {}", i + 1);
    }
    // from R = 1 the driven mode is 1D: w = B/λ (1 - e^{-λt})
    let w = segments_trajectory(&spec, &p, a.phases[2], 1.0).unwrap();
    let exact = p.b[2] / 3.0 * (1.0 - (-3.0 * p.horizon).exp());
    assert!((w[2] - exact).abs() < 1e-10);
    assert!(w.iter().enumerate().all(|(j, v)| j == 2 || *v == 0.0));
}

#[test]
fn outside_the_kicks_nothing_is_excited() {
    let spec = linear(6);
    let p = SegmentsParams::standard(6);
    let total: f64 = p.e.iter().sum();
    let w = segments_trajectory(&spec, &p, total + 0.5, 1.0).unwrap();
    assert!(w.iter().all(|v| *v == 0.0));
}

#[test]
fn smoothness_budget_is_finite() {
    for (s, k) in [(0.0, 1.0), (2.0, 3.0), (5.0, 5.0)] {
        let (sup, seen) = smoothness_budget(s, k, 1.0, 100_000);
        assert!(sup.is_finite() && seen <= sup * (1.0 + 1e-12));
    }
}

#[test]
fn projected_segments_have_large_doubling_factor() {
    let n = 10;
    let spec = linear(n);
    let mut p = SegmentsParams::standard(n);
    p.horizon = 14.0;
    let a = segments_attractor(&spec, &p).unwrap();
    let cloud = PointCloud::new(a.cloud.clone()).unwrap();
    for (i, &len) in a.lengths.iter().enumerate() {
        assert!(doubling_factor_at(&cloud, 0, len, len) >= i + 1, "n = {}", i + 1);
    }
}

#[test]
fn bad_parameters_are_rejected() {
    let spec = linear(4);
    let mut p = SegmentsParams::standard(4);
    p.e = vec![3.0, 2.0, 1.0, 1.0];
    assert!(segments_attractor(&spec, &p).is_err());
    let mut p = SegmentsParams::standard(4);
    p.b.swap(0, 3);
    assert!(segments_attractor(&spec, &p).is_err());
}
