use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wrapfloer::homalg::{
    direct_limit, filtration_subquotient, homology, models, mutate, random_complex, total_dim, validate_complex,
    ChainMap, DirectedSystem, ExtraMap, Z2Matrix, DEFAULT_WINDOW,
};
use wrapfloer::Error;

#[test]
fn model_limits() {
    let lim = |s: &DirectedSystem| direct_limit(s, DEFAULT_WINDOW).unwrap();
    assert_eq!(lim(&models::identity_system(10)).dims, BTreeMap::from([(0, 1)]));
    let z = lim(&models::zero_system(10));
    assert_eq!(z.dims, BTreeMap::from([(0, 0)]));
    assert_eq!(z.finite, BTreeMap::from([(0, 1)]));
    assert_eq!(homology(&models::hf_complex(3, 2)), BTreeMap::from([(6, 1)]));
    let hf = lim(&models::hf_system(2, 12));
    assert!(hf.stable.iter().filter(|(k, _)| **k < 18).all(|(_, v)| *v == Some(0)));
}

#[test]
fn incoherent_extra_map_rejected() {
    let mut sys = models::identity_system(3);
    sys.extra.push(ExtraMap { from: 0, to: 2, maps: BTreeMap::from([(0, Z2Matrix::zeros(1, 1))]) });
    assert!(matches!(direct_limit(&sys, DEFAULT_WINDOW), Err(Error::Incoherent(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_complexes_valid_and_mutations_caught(seed in any::<u64>(), size in 2usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_complex(&mut rng, size, 4);
        prop_assert!(validate_complex(&c).pass);
        prop_assert!(ChainMap::identity(&c).validate().pass);
        let (bad, m) = mutate(&mut rng, &c);
        let rep = validate_complex(&bad);
        prop_assert!(!rep.pass);
        prop_assert!(rep.violations.iter().any(|v| v.kind == m.kind));
    }

    #[test]
    fn homology_additive_and_euler(seed in any::<u64>(), s1 in 1usize..20, s2 in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_complex(&mut rng, s1, 3), random_complex(&mut rng, s2, 3).prefixed("b"));
        let sum = a.direct_sum(&b).unwrap();
        prop_assert_eq!(total_dim(&homology(&sum)), total_dim(&homology(&a)) + total_dim(&homology(&b)));
        // Euler characteristic of homology equals that of the chain groups
        let chi = |h: &BTreeMap<i64, usize>| h.iter().map(|(d, n)| if d % 2 == 0 { *n as i64 } else { -(*n as i64) }).sum::<i64>();
        let chains: i64 = a.generators().iter().map(|g| if g.degree % 2 == 0 { 1 } else { -1 }).sum();
        prop_assert_eq!(chi(&homology(&a)), chains);
    }

    #[test]
    fn full_window_is_the_complex(seed in any::<u64>(), size in 1usize..20) {
        let c = random_complex(&mut ChaCha8Rng::seed_from_u64(seed), size, 3);
        let all = filtration_subquotient(&c, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        prop_assert_eq!(homology(&all), homology(&c));
        let empty = filtration_subquotient(&c, 1e9, f64::INFINITY).unwrap();
        prop_assert_eq!(empty.len(), 0);
    }
}
