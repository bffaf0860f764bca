use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wrapfloer::maslov::{det2_winding, rs_index, rs_index_against};
use wrapfloer::symplin::{
    ConstantPath, DirectSumPath, FactorSpec, FramePath, LagrangianFrame, Reparametrized, TransformedPath,
};
use wrapfloer::verify::{quadratic_chord_index, random_loop, random_path, random_symplectic};
use wrapfloer::{Error, HalfInt};

#[test]
fn quadratic_model_index_is_k() {
    for k in 0..=10u32 {
        assert_eq!(quadratic_chord_index(1, k).unwrap(), HalfInt::from_int(k as i64));
    }
}

#[test]
fn quadratic_model_scales_with_n() {
    for n in 1..=4 {
        for k in 0..=4u32 {
            assert_eq!(quadratic_chord_index(n, k).unwrap(), HalfInt::from_int((n as i64) * k as i64), "n={n} k={k}");
        }
    }
}

#[test]
fn constant_path_has_index_zero() {
    let l = ConstantPath::unit(LagrangianFrame::rotated(&[0.3, 1.1]));
    assert_eq!(rs_index_against(&l, &LagrangianFrame::vertical(2)).unwrap(), HalfInt::ZERO);
}

#[test]
fn loops_must_close() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = random_path(&mut rng, 1).unwrap();
    if let Err(e) = det2_winding(&p) {
        assert!(matches!(e, Error::NotALoop { .. }));
    }
}

fn draw(seed: u64, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 40))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn loop_index_matches_winding(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = draw(seed, n);
        let (lp, w) = random_loop(&mut rng, n).unwrap();
        let idx = rs_index_against(&lp, &LagrangianFrame::vertical(n));
        prop_assume!(idx.is_ok());
        prop_assert_eq!(det2_winding(&lp).unwrap(), w);
        prop_assert_eq!(idx.unwrap(), HalfInt::from_int(w));
    }

    #[test]
    fn symplectic_action_preserves_index(seed in any::<u64>()) {
        let mut rng = draw(seed, 1);
        let (a, b) = (random_path(&mut rng, 1).unwrap(), random_path(&mut rng, 1).unwrap());
        let psi = vec![FactorSpec::Constant(random_symplectic(&mut rng, 1, 0.7).unwrap().into_matrix())];
        let before = rs_index(&a, &b);
        prop_assume!(before.is_ok());
        let after = rs_index(&TransformedPath::new(a, psi.clone()).unwrap(), &TransformedPath::new(b, psi).unwrap());
        prop_assert_eq!(after.unwrap(), before.unwrap());
    }

    #[test]
    fn monotone_time_change_preserves_index(seed in any::<u64>(), s in -0.9f64..0.9) {
        let mut rng = draw(seed, 1);
        let p = random_path(&mut rng, 1).unwrap();
        let v = LagrangianFrame::vertical(1);
        let before = rs_index_against(&p, &v);
        prop_assume!(before.is_ok());
        let q = Reparametrized::new(p, (0.0, 1.0), move |t| t + s * (std::f64::consts::TAU * t).sin() / std::f64::consts::TAU).unwrap();
        prop_assert_eq!(rs_index_against(&q, &v).unwrap(), before.unwrap());
    }

    #[test]
    fn index_is_additive_on_direct_sums(seed in any::<u64>()) {
        let mut rng = draw(seed, 1);
        let (a, b) = (random_path(&mut rng, 1).unwrap(), random_path(&mut rng, 1).unwrap());
        let v = LagrangianFrame::vertical(1);
        let (ia, ib) = (rs_index_against(&a, &v), rs_index_against(&b, &v));
        prop_assume!(ia.is_ok() && ib.is_ok());
        let sum = DirectSumPath::new(a, b).unwrap();
        prop_assert_eq!(sum.n(), 2);
        prop_assert_eq!(rs_index_against(&sum, &LagrangianFrame::vertical(2)).unwrap(), ia.unwrap() + ib.unwrap());
    }
}
