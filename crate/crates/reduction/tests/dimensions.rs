use proptest::prelude::*;
use reduction::*;

fn segments_eps(n_max: usize) -> Vec<f64> {
    (1..=n_max).map(|n| (-(n as f64).ln().powi(2)).exp()).collect()
}

#[test]
fn known_dimensions_are_recovered() {
    let point = PointCloud::new(vec![vec![0.3, -0.2]]).unwrap();
    assert_eq!(box_counting_dim(&point, 1e-3, 1.0, 6).unwrap().dim, 0.0);

    let seg = segment_cloud(1000, 3).unwrap();
    let r = box_counting_dim(&seg, 3e-3, 0.3, 9).unwrap();
    assert!((r.dim - 1.0).abs() < 0.15, "segment {}", r.dim);

    // smallest radius twice the grid spacing; the boundary keeps the slope
    // below 2 at the coarse end even for optimal coverings
    let sq = square_cloud(100).unwrap();
    let lo = 2.0 / 99.0;
    let r = box_counting_dim(&sq, lo, lo * 10f64.powf(1.5), 8).unwrap();
    assert!((r.dim - 2.0).abs() < 0.2, "square {}", r.dim);
    assert_eq!(r.counts.len(), 8);
    assert!(r.counts.windows(2).all(|w| w[0].1 >= w[1].1));
}

#[test]
fn narrow_range_is_rejected() {
    let seg = segment_cloud(50, 1).unwrap();
    assert!(matches!(box_counting_dim(&seg, 0.1, 2.0, 5), Err(ReductionError::DegenerateRange { .. })));
    assert!(box_counting_dim(&seg, 0.0, 2.0, 5).is_err());
}

#[test]
fn fast_segments_have_dimension_one() {
    let eps: Vec<f64> = (1..=30).map(|n| 1.0 / (n * n) as f64).collect();
    let cloud = orthogonal_segments_set(&eps, 2001).unwrap();
    let r = box_counting_dim(&cloud, 0.01, 0.5, 8).unwrap();
    assert!((r.dim - 1.0).abs() < 0.2, "dim {}", r.dim);
}

#[test]
fn orthogonal_segments_doubling_count_is_at_least_n() {
    let eps = segments_eps(30);
    let cloud = orthogonal_segments_set(&eps, 11).unwrap();
    for (i, &e) in eps.iter().enumerate() {
        let n = i + 1;
        assert!(doubling_factor_at(&cloud, 0, e, e) >= n, "n = {n}");
        assert!(doubling_factor(&cloud, e) >= n);
    }
}

#[test]
fn log_doubling_ratio_is_unbounded_for_slow_segments() {
    // along ε_n = exp(-(log n)²) the lower bound log n / log log ε_n^{-1}
    // is minimal near n = e^e and then increases without bound
    let mut prev = 0.0;
    for k in 2..=40 {
        let n = 10f64.powf(k as f64 * 0.5);
        let r = toostr_ratio(n, n.ln().powi(2));
        assert!(r > prev, "k = {k}");
        prev = r;
    }
    assert!(toostr_ratio(1e300, 1e300f64.ln().powi(2)) > 3.5);

    let eps = segments_eps(30);
    let cloud = orthogonal_segments_set(&eps, 5).unwrap();
    let lower = toostr_ratio(30.0, 30f64.ln().powi(2));
    assert!(log_doubling_factor(&cloud, &eps) >= lower - 1e-12);
}

#[test]
fn segment_doubling_factor_stays_small() {
    let seg = segment_cloud(4001, 2).unwrap();
    let d: Vec<usize> = [0.2, 0.05, 0.01, 0.002].iter().map(|&e| doubling_factor(&seg, e)).collect();
    assert!(d.iter().all(|&x| (2..=5).contains(&x)), "{d:?}");
}

#[test]
fn cube_vertices_are_separated_inside_the_ball() {
    let beta = 0.05;
    let eps: Vec<f64> = (1..=12).map(|n| (-beta * (n * n) as f64).exp()).collect();
    let (cloud, members) = cube_vertices_set(&eps).unwrap();
    for (i, idx) in members.iter().enumerate() {
        let n = i + 1;
        let e = eps[i];
        let r = e * (n as f64).sqrt();
        assert_eq!(idx.len(), 1 << n);
        assert!(idx.iter().all(|&k| spectral_core::norm(&cloud.points()[k]) <= r * (1.0 + 1e-12)));
        for (a, &p) in idx.iter().enumerate() {
            for &q in &idx[a + 1..] {
                assert!(cloud.dist(p, q) >= e * (1.0 - 1e-12));
            }
        }
        assert!(doubling_factor_at(&cloud, 0, r, e) >= 1 << n, "n = {n}");
    }
}

#[test]
fn cube_family_ratio_diverges() {
    let beta: f64 = 0.05;
    let ratio = |n: f64| cube_good_ratio(n, beta * n * n);
    // increasing once 2 log n + log β has outgrown log n
    let mut prev = 0.0;
    for k in 4..=30 {
        let n = 10f64.powf(k as f64 * 0.5);
        let r = ratio(n);
        let closed = n / (n.ln() * (2.0 * n.ln() + beta.ln()));
        assert!((r - closed).abs() <= 1e-12 * closed);
        assert!(r > prev);
        prev = r;
    }
    assert!(prev > 1e10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn dimension_is_bi_lipschitz_invariant(a in 0.9f64..1.1, b in -0.1f64..0.1, c in 0.9f64..1.1, w in 0.0f64..0.1) {
        let sq = square_cloud(100).unwrap();
        let mapped = sq.map(|p| vec![a * p[0] + b * p[1] + w * (3.0 * p[1]).sin(), c * p[1] + w * (2.0 * p[0]).cos()]).unwrap();
        let lo = 2.0 / 99.0;
        let d0 = box_counting_dim(&sq, lo, lo * 10f64.powf(1.5), 8).unwrap().dim;
        let d1 = box_counting_dim(&mapped, lo, lo * 10f64.powf(1.5), 8).unwrap().dim;
        prop_assert!((d0 - d1).abs() < 0.1, "{} vs {}", d0, d1);
    }
}
