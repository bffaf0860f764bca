use proptest::prelude::*;
use wrapfloer::profiles::{
    build_beta, build_transfer_profile, radial_action_side, verify_action_signs, verify_monotone, BetaParams,
    RadialProfile, Side,
};
use wrapfloer::verify::reference_schedule;

fn family() -> Vec<RadialProfile> {
    let (s, sch) = reference_schedule(3).unwrap();
    (1..=3).map(|i| build_transfer_profile(i, &s, None, &sch).unwrap()).collect()
}

#[test]
fn reference_schedule_values() {
    let (_, sch) = reference_schedule(3).unwrap();
    assert_eq!(sch.slopes, vec![9.0, 10.0, 11.0]);
    assert_eq!(sch.radii, vec![24.0, 25.0, 26.0]);
    assert_eq!(sch.eps, vec![0.1, 0.05, 0.025]);
}

#[test]
fn family_passes_sign_and_monotone_checks() {
    let (s, _) = reference_schedule(3).unwrap();
    let f = family();
    for h in &f {
        let rep = verify_action_signs(h, Some(&s), None, 100).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.items.len(), 5);
    }
    for w in f.windows(2) {
        assert!(verify_monotone(&w[0], &w[1], 10_000).unwrap().pass);
    }
}

#[test]
fn reversed_pair_is_not_monotone() {
    let f = family();
    assert!(!verify_monotone(&f[1], &f[0], 10_000).unwrap().pass);
}

#[test]
fn beta_endpoints_exact() {
    for delta in [0.01, 0.1, 1.0, 5.0] {
        let b = build_beta(BetaParams { eps: 0.1, delta, rho: 1.0, reeb_norm: 1.0 }, 501).unwrap();
        let g = b.check_envelope_grid(10_000);
        assert!(g.pass, "delta {delta}: {g:?}");
        assert_eq!(b.value(0.9), 0.0);
        assert_eq!(b.value(1.0), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_is_minus_tangent_intercept(stage in 0usize..3, u in 0.0f64..1.0) {
        let f = family();
        let h = &f[stage];
        let r = 0.01 + u * 1.2 * h.breakpoints().last().copied().unwrap();
        let step = 1e-6;
        let (lo, hi) = (h.value(r - step), h.value(r + step));
        let slope = (hi - lo) / (2.0 * step);
        let intercept = h.value(r) - slope * r;
        let act = radial_action_side(h, r, Side::Right);
        prop_assert!((act + intercept).abs() < 1e-6 * (1.0 + act.abs()), "r {} act {} intercept {}", r, act, intercept);
    }

    #[test]
    fn beta_monotone(delta in 0.005f64..2.0, eps in 0.01f64..0.5) {
        let b = build_beta(BetaParams { eps, delta, rho: 1.0, reeb_norm: 1.0 }, 201).unwrap();
        let mut prev = 0.0;
        for i in 0..=400 {
            let r = 1.0 - eps + eps * i as f64 / 400.0;
            let v = b.value(r);
            prop_assert!(v >= prev - 1e-15 && b.derivative(r) >= 0.0);
            prev = v;
        }
    }
}
