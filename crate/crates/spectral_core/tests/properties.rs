use proptest::prelude::*;
use spectral_core::*;

fn spectrum_and_state() -> impl Strategy<Value = (Spectrum, Vec<f64>)> {
    (2usize..40).prop_flat_map(|m| {
        (
            prop::collection::vec(0.01f64..50.0, m),
            prop::collection::vec(-10.0f64..10.0, m),
        )
            .prop_map(|(mut gaps, u)| {
                let mut acc = 0.0;
                for g in gaps.iter_mut() {
                    acc += *g;
                    *g = acc;
                }
                (Spectrum::new(gaps, "prop").unwrap(), u)
            })
    })
}

proptest! {
    #[test]
    fn projectors_split_norm((s, u) in spectrum_and_state(), frac in 0.0f64..1.0) {
        let m = s.len();
        let n = 1 + ((m - 1) as f64 * frac) as usize;
        let p = project_low(&u, n).unwrap();
        let q = project_high(&u, n).unwrap();
        prop_assert_eq!(project_low(&p, n).unwrap(), p.clone());
        prop_assert_eq!(dot(&p, &q), 0.0);
        for i in 0..m {
            prop_assert_eq!(p[i] + q[i], u[i]);
        }
        let total = dot(&u, &u);
        let split = dot(&p, &p) + dot(&q, &q);
        prop_assert!((total - split).abs() <= 1e-12 * total.max(1e-300));
    }

    #[test]
    fn cone_form_is_even((s, u) in spectrum_and_state(), n in 1usize..40) {
        let n = n.min(s.len() - 1);
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        prop_assert_eq!(cone_value(&u, n), cone_value(&neg, n));
    }

    #[test]
    fn semigroup_composes((s, u) in spectrum_and_state(), a in 0.0f64..0.2, b in 0.0f64..0.2) {
        let ab = semigroup_apply(&s, &semigroup_apply(&s, &u, a).unwrap(), b).unwrap();
        let direct = semigroup_apply(&s, &u, a + b).unwrap();
        for (x, y) in ab.iter().zip(&direct) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300));
        }
        let bound = (-s.values()[0] * (a + b)).exp() * norm(&u);
        prop_assert!(norm(&direct) <= bound * (1.0 + 1e-14));
    }

    #[test]
    fn shifted_dichotomy((s, u) in spectrum_and_state(), n in 1usize..40, t in 0.0f64..1.0) {
        let n = n.min(s.len() - 1);
        let d = s.dichotomy(n).unwrap();
        prop_assume!(d.theta > 0.0);
        let lam = s.values();
        // high modes forward
        let hi: f64 = (n..lam.len()).map(|i| (u[i] * (-(lam[i] - d.alpha) * t).exp()).powi(2)).sum::<f64>().sqrt();
        let hi0: f64 = u[n..].iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(hi <= (-d.theta * t).exp() * hi0 * (1.0 + 1e-13));
        // low modes backward (t -> -t)
        let lo: f64 = (0..n).map(|i| (u[i] * ((lam[i] - d.alpha) * t).exp()).powi(2)).sum::<f64>().sqrt();
        let lo0: f64 = u[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(lo <= (-d.theta * t).exp() * lo0 * (1.0 + 1e-13));
    }

    #[test]
    fn shell_sets_partition((s, _u) in spectrum_and_state(), n in 1usize..40, frac in 0.0f64..1.0) {
        let n = n.min(s.len() - 1);
        let k = frac * s.values()[n - 1] * 0.999;
        let sh = shell_projector(&s, n, k).unwrap();
        let mut all: Vec<usize> = sh.low.iter().chain(&sh.shell).chain(&sh.high).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..s.len()).collect::<Vec<_>>());
        prop_assert!(sh.shell.contains(&(n - 1)) && sh.shell.contains(&n));
    }
}
