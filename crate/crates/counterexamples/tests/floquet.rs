use counterexamples::*;
use spectral_core::Spectrum;
use std::sync::OnceLock;

fn linear(m: usize) -> Spectrum {
    Spectrum::new((1..=m).map(|n| n as f64).collect(), "λ_n = n").unwrap()
}

fn sixteen() -> &'static (PeriodicOperator, PoincareReport) {
    static CELL: OnceLock<(PeriodicOperator, PoincareReport)> = OnceLock::new();
    CELL.get_or_init(|| {
        let op = build_periodic_operator(&linear(16), OperatorParams::new(1.0, 4.0)).unwrap();
        let rep = poincare_map(&op, 20_000).unwrap();
        (op, rep)
    })
}

#[test]
fn multiplier_formula_values() {
    let (op, _) = sixteen();
    assert!((op.log_mu(1) + 4.0).abs() < 1e-15);
    assert!((op.log_mu0() + 2.0).abs() < 1e-15);
}

#[test]
fn rotation_angle_is_a_quarter_turn() {
    let (op, _) = sixteen();
    assert!((op.eps * op.theta1_integral - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    let second = adaptive_simpson(&|t| op.theta1(-op.profile(t)), 1.0 + op.t0, 2.0 - op.t0, 1e-14).unwrap();
    assert!((second - op.theta1_integral).abs() < 1e-10);
    assert!(op.norm_max <= op.params.l);
    let gap_bound = 0.5 + op.eps;
    assert!(op.norm_max <= gap_bound.max(op.kappa) + 1e-12);
}

#[test]
fn operator_is_periodic() {
    let (op, _) = sixteen();
    let w: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
    let (mut a, mut b) = (vec![0.0; 16], vec![0.0; 16]);
    for t in [0.1, 0.55, 1.3, 1.9] {
        op.rhs(t, &w, &mut a);
        op.rhs(t + 2.0, &w, &mut b);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn period_map_is_the_weighted_shift() {
    let (_, rep) = sixteen();
    assert_eq!(rep.excluded, vec![15]);
    assert_eq!(rep.checks.len(), 15);
    assert!(rep.max_rel_error <= 1e-6, "{}", rep.max_rel_error);
    assert!(rep.max_residual <= 1e-10, "{}", rep.max_residual);
    let c = rep.checks.iter().find(|c| c.source == 1).unwrap();
    assert_eq!(c.target, 3);
    assert!((c.measured.abs() / (-4.0f64).exp() - 1.0).abs() < 1e-6);
}

#[test]
fn multipliers_converge_under_refinement() {
    let op = build_periodic_operator(&linear(8), OperatorParams::new(1.0, 4.0)).unwrap();
    let coarse = poincare_map(&op, 2_000).unwrap();
    let fine = poincare_map(&op, 8_000).unwrap();
    assert!(fine.max_rel_error < coarse.max_rel_error.max(1e-12));
    assert!(fine.max_rel_error < 1e-8);
}

#[test]
fn literal_first_mode_changes_only_mu0() {
    let mut p = OperatorParams::new(1.0, 4.0);
    p.literal_first_mode = true;
    let op = build_periodic_operator(&linear(8), p).unwrap();
    let rep = poincare_map(&op, 8_000).unwrap();
    assert!(rep.max_rel_error < 1e-6);
    assert!((op.log_mu0() + 2.5).abs() < 1e-15);
}

#[test]
fn decay_table_against_closed_form() {
    let op = build_periodic_operator(&linear(24), OperatorParams::new(1.0, 4.0)).unwrap();
    let rep = poincare_map(&op, 20_000).unwrap();
    let table = superexp_decay(&op, &rep, 12).unwrap();
    assert!((table.rows[0].log_norm_product - op.log_mu0()).abs() < 1e-15);
    for r in &table.rows {
        let n = r.n as f64;
        assert!((r.log_norm_product - (-2.0 * n * n + 2.0 * n - 2.0)).abs() < 1e-9);
        assert!((r.log_norm_map - r.log_norm_product).abs() < 1e-6, "N = {}", r.n);
    }
    assert!(table.fit.quad_coeff < 0.0 && table.fit.r2 > 0.99);
    assert!(table.in_bracket, "{:?} {:?}", table.fit, table.bracket);
    assert!(matches!(superexp_decay(&op, &rep, 13), Err(CounterexampleError::ChainTruncated { .. })));
}

#[test]
fn structured_chain_matches_dense_iteration() {
    let (op, rep) = sixteen();
    let mut v = spectral_core::basis(16, 1);
    for step in 1..=5 {
        let mut next = vec![0.0; 16];
        for (j, &c) in v.iter().enumerate() {
            for (i, x) in rep.images[j].iter().enumerate() {
                next[i] += c * x;
            }
        }
        v = next;
        let dense = spectral_core::norm(&v).ln();
        let chain = chain_log_norm(op, Some(rep), 2, step).unwrap();
        assert!((dense - chain).abs() < 1e-6, "step {step}");
    }
}

#[test]
fn middle_ratio_is_one_on_the_diagonal_and_first_ratio_shrinks() {
    let op = build_periodic_operator(&linear(80), OperatorParams::new(1.0, 4.0)).unwrap();
    let n1 = nonuniform_ratios(&op, None, 1).unwrap();
    assert_eq!(n1.k, 1);
    let mut prev = f64::INFINITY;
    for n in [4, 9, 16] {
        let r = nonuniform_ratios(&op, None, n).unwrap();
        assert!(r.first_log_max < prev && r.first_log_max < 0.0);
        assert!(r.beta > 0.0);
        assert!(r.middle_log_max >= 0.0 && r.middle_log_max <= r.gamma * (n as f64).powf(1.5) + 1e-9);
        prev = r.first_log_max;
    }
    let same = chain_log_norm(&op, None, 8, 9).unwrap() - chain_log_norm(&op, None, 8, 9).unwrap();
    assert_eq!(same, 0.0);
}

#[test]
fn measured_ratios_match_products() {
    let op = build_periodic_operator(&linear(40), OperatorParams::new(1.0, 4.0)).unwrap();
    let rep = poincare_map(&op, 10_000).unwrap();
    for n in [4, 6] {
        let r = nonuniform_ratios(&op, Some(&rep), n).unwrap();
        assert!(r.max_log_diff < 1e-6, "n = {n}: {}", r.max_log_diff);
    }
}

#[test]
fn pair_data_decays_faster_than_any_exponential() {
    let (op, _) = sixteen();
    let w0 = spectral_core::basis(16, 1);
    // beyond five periods round-off fed into the slower even chain dominates
    let (t, w) = floquet_pair_data(op, &w0, 5, 8, 1000).unwrap();
    let logs: Vec<f64> = w.iter().map(|v| spectral_core::norm(v).ln()).collect();
    let fit = dynamics::decay_rate_fit_log(&t, &logs).unwrap();
    assert!(fit.quad_coeff < 0.0 && fit.quad_coeff.is_finite());
    // secant rates over successive periods keep growing
    let per = 8;
    let rates: Vec<f64> = (0..5).map(|p| -(logs[(p + 1) * per] - logs[p * per]) / 2.0).collect();
    assert!(rates.windows(2).all(|r| r[1] > r[0]), "{rates:?}");
}

#[test]
fn norm_bound_violation_is_reported() {
    let r = build_periodic_operator(&linear(8), OperatorParams::new(0.2, 2.5));
    assert!(matches!(r, Err(CounterexampleError::NormBound { .. })), "{r:?}");
    assert!(matches!(build_periodic_operator(&linear(8), OperatorParams::new(1.0, 1.5)), Err(CounterexampleError::BelowThreshold { .. })));
}
