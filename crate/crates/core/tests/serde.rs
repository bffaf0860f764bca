use std::collections::BTreeMap;

use wrapfloer::homalg::{models, DirectedSystem, FilteredZ2Complex, Generator, Z2Matrix};
use wrapfloer::profiles::{build_transfer_profile, RadialProfile, SpectrumSet};
use wrapfloer::symplin::{FramePath, LagrangianFrame, LagrangianPath};
use wrapfloer::verify::{random_path, reference_schedule};
use wrapfloer::HalfInt;

#[test]
fn half_int_as_halves() {
    assert_eq!(serde_json::to_string(&HalfInt::from_halves(5)).unwrap(), r#"{"halves":5}"#);
    assert_eq!(serde_json::from_str::<HalfInt>(r#"{"halves":-3}"#).unwrap(), HalfInt::from_halves(-3));
}

#[test]
fn path_round_trip() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
    let p: LagrangianPath = random_path(&mut rng, 2).unwrap().into();
    let back: LagrangianPath = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
    assert!((back.frame_at(0.37) - p.frame_at(0.37)).amax() < 1e-15);
}

#[test]
fn frames_are_validated_on_input() {
    let bad = r#"{"n": 1, "columns": [[0.0, 0.0]]}"#;
    assert!(serde_json::from_str::<LagrangianFrame>(bad).is_err());
    let good = r#"{"n": 2, "columns": [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]}"#;
    assert!(serde_json::from_str::<LagrangianFrame>(good)
        .unwrap()
        .same_subspace(&LagrangianFrame::horizontal(2))
        .unwrap());
}

#[test]
fn profile_round_trip() {
    let (s, sch) = reference_schedule(3).unwrap();
    let h = build_transfer_profile(3, &s, None, &sch).unwrap();
    let back: RadialProfile = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
    assert_eq!(back, h);
}

#[test]
fn spectrum_sorted_and_positive() {
    let s: SpectrumSet = serde_json::from_str("[3.0, 1.0, 3.0]").unwrap();
    assert_eq!(s.values(), &[1.0, 3.0]);
    assert!(serde_json::from_str::<SpectrumSet>("[-1.0]").is_err());
}

#[test]
fn complex_round_trip_by_ids() {
    let c =
        FilteredZ2Complex::from_pairs(vec![Generator::new("x", 1, 2.0), Generator::new("y", 0, 1.0)], &[("y", "x")])
            .unwrap();
    let text = serde_json::to_string(&c).unwrap();
    assert!(text.contains(r#"["y","x"]"#));
    assert_eq!(serde_json::from_str::<FilteredZ2Complex>(&text).unwrap(), c);
    assert!(serde_json::from_str::<FilteredZ2Complex>(r#"{"generators":[],"differential":[["a","b"]]}"#).is_err());
}

#[test]
fn system_round_trip() {
    let sys = models::identity_system(4);
    let back: DirectedSystem = serde_json::from_str(&serde_json::to_string(&sys).unwrap()).unwrap();
    assert_eq!(back, sys);
    let m: Z2Matrix = serde_json::from_str(r#"{"rows":2,"cols":2,"entries":[[0,1]]}"#).unwrap();
    assert!(m.get(0, 1) && !m.get(1, 0));
    let _: BTreeMap<i64, usize> = serde_json::from_str(r#"{"0": 1}"#).unwrap();
}
