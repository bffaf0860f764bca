use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wrapfloer::handle::{transversality_certificate, GridSpec, HandleParams};
use wrapfloer::homalg::{direct_limit, homology, models, DEFAULT_WINDOW};
use wrapfloer::maslov::rs_index_against;
use wrapfloer::profiles::{build_beta, build_transfer_profile, verify_action_signs, BetaParams};
use wrapfloer::symplin::LagrangianFrame;
use wrapfloer::verify::{quadratic_chord_index, reference_schedule};
use wrapfloer_bench::{complex, random_paths};

fn maslov(c: &mut Criterion) {
    c.bench_function("quadratic_chord_k10", |b| b.iter(|| quadratic_chord_index(1, black_box(10)).unwrap()));
    for n in [1, 3] {
        let paths = random_paths(7, n, 8);
        let v = LagrangianFrame::vertical(n);
        c.bench_function(&format!("rs_index_random_n{n}"), |b| {
            b.iter(|| paths.iter().filter_map(|p| rs_index_against(p, &v).ok()).count())
        });
    }
}

fn handle(c: &mut Criterion) {
    let p = HandleParams::new(3, 1, 0.1, 0.05).unwrap();
    let g = GridSpec::default_for(&p, 50);
    c.bench_function("certificate_50", |b| b.iter(|| transversality_certificate(&p, black_box(&g)).unwrap()));
}

fn profiles(c: &mut Criterion) {
    let (s, sch) = reference_schedule(3).unwrap();
    c.bench_function("transfer_profile_and_signs", |b| {
        b.iter(|| {
            let h = build_transfer_profile(2, &s, None, &sch).unwrap();
            verify_action_signs(&h, Some(&s), None, 100).unwrap()
        })
    });
    let params = BetaParams { eps: 0.1, delta: 0.01, rho: 1.0, reeb_norm: 1.0 };
    c.bench_function("beta_grid_1e4", |b| b.iter(|| build_beta(params, 1001).unwrap().check_envelope_grid(10_000)));
}

fn algebra(c: &mut Criterion) {
    let cx = complex(3, 400);
    c.bench_function("homology_400", |b| b.iter(|| homology(black_box(&cx))));
    let sys = models::hf_system(3, 200);
    c.bench_function("hf_limit_200", |b| b.iter(|| direct_limit(black_box(&sys), DEFAULT_WINDOW).unwrap()));
}

criterion_group!(benches, maslov, handle, profiles, algebra);
criterion_main!(benches);
