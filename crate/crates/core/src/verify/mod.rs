//! Seeded verification suites behind `verify-all`.

mod axioms;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use axioms::{
    axiom_suite, random_lagrangian, random_loop, random_path, random_symmetric, random_symplectic, AxiomConfig,
    AxiomTally,
};

use crate::error::Result;
use crate::handle::{
    liouville_field, liouville_flow, liouville_form, omega, potentials, quadratic_model_path, radial_slope,
    transversality_certificate, GridSpec, HandleParams, HandlePoint,
};
use crate::homalg::{self, models, ChainMap};
use crate::maslov::{chord_maslov, HalfInt};
use crate::profiles::{
    build_beta, build_transfer_profile, verify_action_signs, verify_monotone, BetaParams, SlopeOptions, SpectrumSet,
    TransferSchedule,
};
use crate::spectrum::{handle_rs_index, index_sweep, perturbation_cluster_bounds};
use crate::symplin::ConstantPath;
use crate::symplin::LagrangianFrame;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((pass, detail)) => Self::new(name, pass, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        Self { suite: suite.into(), pass: checks.iter().all(|c| c.pass), checks }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

/// Sizes of the randomized parts of the suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub axioms: AxiomConfig,
    pub handle_points: usize,
    pub certificate_resolution: usize,
    pub mutated_complexes: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { axioms: AxiomConfig::default(), handle_points: 1000, certificate_resolution: 50, mutated_complexes: 50 }
    }
}

/// `mu` of the quadratic model chord on `R^n` against `R^n`.
pub fn quadratic_chord_index(n: usize, k: u32) -> Result<HalfInt> {
    let p = quadratic_model_path(n, k)?;
    chord_maslov(&p, &ConstantPath::unit(LagrangianFrame::horizontal(n)), n)
}

pub fn maslov_suite(seed: u64, cfg: &AxiomConfig) -> SuiteReport {
    let mut checks = Vec::new();
    let quad: Vec<_> = (0..=10u32).map(|k| (k, quadratic_chord_index(1, k))).collect();
    let bad: Vec<String> = quad
        .iter()
        .filter(|(k, r)| r.as_ref().ok() != Some(&HalfInt::from_int(*k as i64)))
        .map(|(k, r)| format!("k={k}: {r:?}"))
        .collect();
    checks.push(Check::new("quadratic_model_index", bad.is_empty(), bad.join("; ")));
    let cases: Vec<(usize, u32)> = (1..=5).flat_map(|n| (0..=6).map(move |k| (n, k))).collect();
    let bad: Vec<String> = cases
        .par_iter()
        .filter_map(|&(n, k)| match quadratic_chord_index(n, k) {
            Ok(v) if v == HalfInt::from_int(n as i64 * k as i64) => None,
            other => Some(format!("n={n} k={k}: {other:?}")),
        })
        .collect();
    checks.push(Check::new("product_grading", bad.is_empty(), bad.join("; ")));
    for t in axiom_suite(seed, cfg) {
        let detail = format!("passed {} failed {} skipped {} {}", t.passed, t.failed, t.skipped, t.failures.join("; "));
        checks.push(Check::new(format!("axiom_{}", t.axiom), t.pass(), detail.trim_end()));
    }
    SuiteReport::new("maslov", checks)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> HandlePoint {
    HandlePoint::new((0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect())
}

/// Largest deviations of `X - grad phi`, `i_X omega - lambda` and the flow group law over random points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandleIdentityErrors {
    pub gradient: f64,
    pub contraction: f64,
    pub group_law: f64,
    pub points: usize,
}

pub fn handle_identity_errors(seed: u64, points: usize) -> Result<HandleIdentityErrors> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = HandleIdentityErrors { gradient: 0.0, contraction: 0.0, group_law: 0.0, points };
    for _ in 0..points {
        let n = rng.random_range(2..=5);
        let k = rng.random_range(1..n);
        let params = HandleParams::new(n, k, 0.1, 0.05)?;
        let p = random_point(&mut rng, n);
        let x = liouville_field(&p, &params)?;
        let lam = liouville_form(&p, &params)?;
        for j in 0..2 * n {
            // phi is quadratic, so the unit-step central difference is exact
            let shift = |s: f64| {
                let mut c = p.coords.clone();
                c[j] += s;
                HandlePoint::new(c)
            };
            let g = (potentials(&shift(1.0), &params)?.phi - potentials(&shift(-1.0), &params)?.phi) / 2.0;
            out.gradient = out.gradient.max((g - x[j]).abs());
            let mut e = vec![0.0; 2 * n];
            e[j] = 1.0;
            out.contraction = out.contraction.max((omega(&x, &e, k) - lam[j]).abs());
        }
        let (s, t) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let two = liouville_flow(&liouville_flow(&p, s, &params)?, t, &params)?;
        let one = liouville_flow(&p, s + t, &params)?;
        let scale = one.coords.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let dev = two.coords.iter().zip(&one.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        out.group_law = out.group_law.max(dev);
    }
    Ok(out)
}

pub fn handle_suite(seed: u64, points: usize, resolution: usize) -> SuiteReport {
    let mut checks = Vec::new();
    match handle_identity_errors(seed, points) {
        Ok(e) => {
            checks.push(Check::new(
                "liouville_is_gradient",
                e.gradient <= 1e-12,
                format!("max error {:e}", e.gradient),
            ));
            checks.push(Check::new(
                "contraction_is_lambda",
                e.contraction <= 1e-9,
                format!("max error {:e}", e.contraction),
            ));
            checks.push(Check::new(
                "flow_group_law",
                e.group_law <= 1e-12,
                format!("max relative error {:e}", e.group_law),
            ));
        }
        Err(err) => checks.push(Check::new("handle_identities", false, err.to_string())),
    }
    for eps in [0.1, 0.05] {
        for delta in [0.05, 0.01] {
            let r = HandleParams::new(2, 1, eps, delta).map(|p| radial_slope(&p));
            checks.push(Check::from_result(
                &format!("radial_slope eps={eps} delta={delta}"),
                r.map(|s| ((s - eps).abs() <= 1e-12, format!("slope {s}"))),
            ));
            let cert = HandleParams::new(2, 1, eps, delta)
                .and_then(|p| transversality_certificate(&p, &GridSpec::default_for(&p, resolution)));
            checks.push(Check::from_result(
                &format!("transversality eps={eps} delta={delta}"),
                cert.map(|c| (c.pass, format!("min {:e} over {} points", c.min_value, c.points_evaluated))),
            ));
        }
    }
    SuiteReport::new("handle", checks)
}

/// The schedule for the spectrum `{pi, 2pi, 3pi}` with `C = 2` and `eps_1 = 0.1`.
pub fn reference_schedule(stages: usize) -> Result<(SpectrumSet, TransferSchedule)> {
    let spectrum = SpectrumSet::new(vec![PI, 2.0 * PI, 3.0 * PI])?;
    let schedule = TransferSchedule::derive(&spectrum, stages, 0.1, &SlopeOptions::new(2.0))?;
    Ok((spectrum, schedule))
}

pub fn profile_suite() -> SuiteReport {
    let mut checks = Vec::new();
    match reference_schedule(3) {
        Ok((s, sch)) => {
            let built: Vec<_> = (1..=3).map(|n| build_transfer_profile(n, &s, None, &sch)).collect();
            for (i, h) in built.iter().enumerate() {
                let r = h.as_ref().map_err(Clone::clone).and_then(|h| verify_action_signs(h, Some(&s), None, 100));
                checks.push(Check::from_result(
                    &format!("action_signs stage {}", i + 1),
                    r.map(|rep| {
                        let m: Vec<String> =
                            rep.items.iter().map(|it| format!("{}:{:.3e}", it.item, it.margin)).collect();
                        (rep.pass, m.join(" "))
                    }),
                ));
            }
            for i in 0..2 {
                let r = match (&built[i], &built[i + 1]) {
                    (Ok(a), Ok(b)) => verify_monotone(a, b, 10_000),
                    (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                };
                checks.push(Check::from_result(
                    &format!("monotone stages {}-{}", i + 1, i + 2),
                    r.map(|rep| (rep.pass, format!("min gap {:e}, checkpoint {:?}", rep.min_gap, rep.checkpoint))),
                ));
            }
        }
        Err(e) => checks.push(Check::new("schedule", false, e.to_string())),
    }
    let beta = build_beta(BetaParams { eps: 0.1, delta: 0.01, rho: 1.0, reeb_norm: 1.0 }, 4001);
    checks.push(Check::from_result(
        "beta_envelope",
        beta.map(|b| {
            let g = b.check_envelope_grid(10_000);
            let e = b.check_envelope();
            (g.pass && e.pass, format!("max ratio {:e}, scaled derivative {:e}", g.max_ratio, e.max_scaled_derivative))
        }),
    ));
    SuiteReport::new("profiles", checks)
}

pub fn spectrum_suite() -> SuiteReport {
    let mut checks = Vec::new();
    checks.push(Check::from_result(
        "handle_index n=3 k=1 aCz=2pi",
        handle_rs_index(3, 1, 2.0 * PI, 1.0).map(|v| (v == HalfInt::from_halves(5), format!("{v}"))),
    ));
    checks.push(Check::from_result(
        "cluster_bounds n=3 k=1 m=1",
        perturbation_cluster_bounds(3, 1, 2.0 * PI, 1.0).map(|c| {
            let want = [(-1, 5), (1, 7)];
            let got = [(c.first.lo.halves, c.first.hi.halves), (c.second.lo.halves, c.second.hi.halves)];
            (got == want, format!("{got:?} (halves)"))
        }),
    ));
    let sweep = HandleParams::new(2, 1, 0.1, 0.05).and_then(|p| index_sweep(&p, 5, 4));
    match sweep {
        Ok(rows) => {
            let ode_vs_corrected: Vec<String> = rows
                .iter()
                .filter(|r| r.mu_rs_ode != r.mu_rs_corrected)
                .map(|r| format!("({},{},{})", r.n, r.k, r.m))
                .collect();
            checks.push(Check::new(
                "ode_matches_crossing_form_count",
                ode_vs_corrected.is_empty(),
                ode_vs_corrected.join(" "),
            ));
            let off: Vec<String> = rows
                .iter()
                .filter(|r| !r.agrees())
                .map(|r| format!("({},{},{}): ode {} formula {}", r.n, r.k, r.m, r.mu_rs_ode, r.mu_rs_formula))
                .collect();
            checks.push(Check::new(
                "ode_matches_closed_form",
                off.is_empty(),
                format!("{} of {} cases differ; {}", off.len(), rows.len(), off.first().cloned().unwrap_or_default()),
            ));
        }
        Err(e) => checks.push(Check::new("index_sweep", false, e.to_string())),
    }
    SuiteReport::new("spectrum", checks)
}

pub fn homalg_suite(seed: u64, mutated: usize) -> SuiteReport {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut caught = 0;
    let mut valid = 0;
    for _ in 0..mutated {
        let size = rng.random_range(4..16);
        let c = homalg::random_complex(&mut rng, size, 4);
        valid += usize::from(homalg::validate_complex(&c).pass);
        let (bad, m) = homalg::mutate(&mut rng, &c);
        let rep = homalg::validate_complex(&bad);
        caught += usize::from(rep.violations.iter().any(|v| v.kind == m.kind));
    }
    checks.push(Check::new("random_complexes_valid", valid == mutated, format!("{valid}/{mutated}")));
    checks.push(Check::new("mutations_detected", caught == mutated, format!("{caught}/{mutated}")));
    let lim = |s: &homalg::DirectedSystem| homalg::direct_limit(s, homalg::DEFAULT_WINDOW).map(|r| r.dims);
    checks.push(Check::from_result(
        "identity_system",
        lim(&models::identity_system(10)).map(|d| (d == BTreeMap::from([(0, 1)]), format!("{d:?}"))),
    ));
    checks.push(Check::from_result(
        "zero_system",
        lim(&models::zero_system(10)).map(|d| (d == BTreeMap::from([(0, 0)]), format!("{d:?}"))),
    ));
    let hf: Result<(bool, String)> = (1..=5)
        .map(|n| {
            let stages = 12;
            let r = homalg::direct_limit(&models::hf_system(n, stages), homalg::DEFAULT_WINDOW)?;
            let fixed: Vec<_> =
                r.stable.iter().filter(|(k, _)| **k < (n * (stages - homalg::DEFAULT_WINDOW)) as i64).collect();
            Ok(!fixed.is_empty() && fixed.iter().all(|(_, v)| **v == Some(0)))
        })
        .collect::<Result<Vec<bool>>>()
        .map(|v| (v.iter().all(|b| *b), "limit 0 in every stabilized degree, n = 1..5".into()));
    checks.push(Check::from_result("hf_system_limit", hf));
    let c = homalg::random_complex(&mut rng, 8, 3);
    let id = ChainMap::identity(&c);
    let square = homalg::check_square(&id, &id, &id, &id).map(|r| r.commutes);
    let mut off = id.clone();
    if let Some(j) = (0..c.len()).next() {
        off.matrix.toggle(j, j);
    }
    let broken = homalg::check_square(&id, &id, &id, &off).map(|r| !r.commutes);
    checks.push(Check::from_result(
        "diagram_square",
        square.and_then(|a| broken.map(|b| (a && b, format!("identities commute: {a}, perturbed caught: {b}")))),
    ));
    let hom = homalg::homology(&models::hf_complex(3, 2));
    checks.push(Check::new("hf_complex_homology", hom == BTreeMap::from([(6, 1)]), format!("{hom:?}")));
    SuiteReport::new("homalg", checks)
}

/// Every suite for a fixed seed; the result depends only on `seed` and `cfg`.
pub fn verify_all(seed: u64, cfg: &VerifyConfig) -> VerifyReport {
    let suites = vec![
        maslov_suite(seed, &cfg.axioms),
        handle_suite(seed, cfg.handle_points, cfg.certificate_resolution),
        profile_suite(),
        spectrum_suite(),
        homalg_suite(seed, cfg.mutated_complexes),
    ];
    VerifyReport { seed, pass: suites.iter().all(|s| s.pass), suites }
}
