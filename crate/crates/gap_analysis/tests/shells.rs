use gap_analysis::*;
use models::TorusGrid;
use num_complex::Complex64;

fn pairwise_oracle(n: u64, k: f64, rho: f64) -> bool {
    let pts = shell_points(n as f64 + 0.5, k);
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let d2: i64 = (0..3).map(|a| (p[a] - q[a]) * (p[a] - q[a])).sum();
            if (d2 as f64) <= rho * rho {
                return false;
            }
        }
    }
    true
}

#[test]
fn returned_shells_pass_pairwise_check() {
    for &(k, rho) in &[(2.0, 3.0), (1.0, 2.0)] {
        for n in shell_search(k, rho, 600) {
            assert!(pairwise_oracle(n, k, rho), "k={k} rho={rho} N={n}");
        }
    }
}

#[test]
fn shell_search_matches_oracle_on_small_range() {
    for &(k, rho) in &[(0.5, 1.5), (1.0, 2.0), (2.0, 3.0)] {
        let found = shell_search(k, rho, 300);
        for n in 1..=300u64 {
            assert_eq!(found.contains(&n), pairwise_oracle(n, k, rho), "k={k} rho={rho} N={n}");
        }
    }
}

#[test]
fn search_is_ordered_and_deterministic() {
    let a = shell_search(1.0, 1.5, 500);
    assert!(a.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(a, shell_search(1.0, 1.5, 500));
}

fn first_shell(k: f64, rho: f64) -> u64 {
    shell_search(k, rho, 200)[0]
}

#[test]
fn averaging_defect_decreases_with_separation() {
    let g = TorusGrid::new(3, 24).unwrap();
    let u = g.synthesize(&[
        ([1, 0, 0], Complex64::new(0.8, 0.2)),
        ([0, 1, 0], Complex64::new(-0.5, 0.4)),
        ([0, 0, 1], Complex64::new(0.3, -0.6)),
    ]);
    let fp = |_x: [f64; 3], u: f64| 1.0 / (1.0 + u * u);
    let k = 1.0;
    let mut last = f64::INFINITY;
    for &rho in &[1.0, 2.0, 3.0] {
        let n = first_shell(k, rho);
        let c = n as f64 + 0.5;
        let mut v = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut vn = 0.0f64;
        for p in shell_points(c, k) {
            let i = g.index_of(p).unwrap();
            let s = (p[0] + 2 * p[1] + 3 * p[2]) as f64;
            v[i] = Complex64::new(s.cos(), s.sin());
            vn += 1.0;
        }
        let d = models::spatial_averaging_defect(&u, &v, c, c, k, &fp, &g) / vn.sqrt();
        assert!(d < last, "rho={rho} N={n}: {d} !< {last}");
        last = d;
    }
    assert!(last < 1e-3);
}
