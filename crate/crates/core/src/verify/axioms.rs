use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maslov::{det2_winding, pair_crossings, rs_index, rs_index_against, HalfInt};
use crate::symplin::{
    ConstantPath, DirectSumPath, FactorSpec, FnPath, GeneratorPath, LagrangianFrame, Mat, Reparametrized, Restricted,
    Schedule, SymplecticMatrix, TransformedPath,
};

/// How many successful draws each axiom needs, and how many draws to attempt at most.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomConfig {
    pub samples: usize,
    pub loops: usize,
    pub max_draws: usize,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        Self { samples: 100, loops: 50, max_draws: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomTally {
    pub axiom: String,
    pub passed: usize,
    pub failed: usize,
    /// Draws with an irregular crossing somewhere, which the index engine refuses.
    pub skipped: usize,
    pub failures: Vec<String>,
    pub required: usize,
}

impl AxiomTally {
    pub fn pass(&self) -> bool {
        self.failed == 0 && self.passed >= self.required
    }
}

enum Outcome {
    Pass,
    Fail(String),
    Skip,
}

fn judge(r: Result<Option<String>>) -> Outcome {
    match r {
        Ok(None) => Outcome::Pass,
        Ok(Some(msg)) => Outcome::Fail(msg),
        Err(Error::IrregularCrossing { .. }) => Outcome::Skip,
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

fn compare(what: &str, lhs: HalfInt, rhs: HalfInt) -> Option<String> {
    (lhs != rhs).then(|| format!("{what}: {lhs} != {rhs}"))
}

pub fn random_symmetric(rng: &mut impl Rng, dim: usize, scale: f64) -> Mat {
    let mut m = Mat::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = rng.random_range(-scale..scale);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub fn random_symplectic(rng: &mut impl Rng, n: usize, scale: f64) -> Result<SymplecticMatrix> {
    SymplecticMatrix::exp_hamiltonian(1.0, &random_symmetric(rng, 2 * n, scale))
}

pub fn random_lagrangian(rng: &mut impl Rng, n: usize) -> Result<LagrangianFrame> {
    let angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect();
    random_symplectic(rng, n, 0.5)?.apply(&LagrangianFrame::rotated(&angles))
}

/// `exp(c t J S_1) exp(b sin(2 pi f t + p) J S_2) L`.
pub fn random_path(rng: &mut impl Rng, n: usize) -> Result<GeneratorPath> {
    let l = random_lagrangian(rng, n)?;
    let factors = vec![
        FactorSpec::Exponential {
            generator: random_symmetric(rng, 2 * n, 1.0),
            schedule: Schedule::linear(rng.random_range(-4.0..4.0)),
        },
        FactorSpec::Exponential {
            generator: random_symmetric(rng, 2 * n, 1.0),
            schedule: Schedule::Sine {
                amplitude: rng.random_range(-1.5..1.5),
                frequency: [0.5, 1.0][rng.random_range(0..2)],
                phase: rng.random_range(0.0..std::f64::consts::TAU),
            },
        },
    ];
    GeneratorPath::new(l, factors, (0.0, 1.0))
}

/// `exp(sin(2 pi t) J S) G diag(e^{i pi m_j t}) R^n`, a loop with `det^2` winding `sum m_j`.
pub fn random_loop(rng: &mut impl Rng, n: usize) -> Result<(GeneratorPath, i64)> {
    let m: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
    let mut d = Mat::zeros(2 * n, 2 * n);
    for (j, &mj) in m.iter().enumerate() {
        d[(j, j)] = mj as f64 * std::f64::consts::PI;
        d[(n + j, n + j)] = mj as f64 * std::f64::consts::PI;
    }
    let factors = vec![
        FactorSpec::Exponential {
            generator: random_symmetric(rng, 2 * n, 1.0),
            schedule: Schedule::Sine { amplitude: 1.0, frequency: 1.0, phase: 0.0 },
        },
        FactorSpec::Constant(random_symplectic(rng, n, 0.7)?.into_matrix()),
        FactorSpec::Exponential { generator: d, schedule: Schedule::linear(1.0) },
    ];
    Ok((GeneratorPath::new(LagrangianFrame::horizontal(n), factors, (0.0, 1.0))?, m.iter().sum()))
}

fn naturality(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let n = rng.random_range(1..=2);
    let (a, b) = (random_path(rng, n)?, random_path(rng, n)?);
    let psi = vec![
        FactorSpec::Exponential {
            generator: random_symmetric(rng, 2 * n, 1.0),
            schedule: Schedule::linear(rng.random_range(-3.0..3.0)),
        },
        FactorSpec::Constant(random_symplectic(rng, n, 0.7)?.into_matrix()),
    ];
    let lhs = rs_index(&TransformedPath::new(a.clone(), psi.clone())?, &TransformedPath::new(b.clone(), psi)?)?;
    Ok(compare("naturality", lhs, rs_index(&a, &b)?))
}

fn concatenation(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let n = rng.random_range(1..=2);
    let (a, b) = (random_path(rng, n)?, random_path(rng, n)?);
    let times: Vec<f64> = pair_crossings(&a, &b)?.iter().map(|c| c.time).collect();
    let mut c = rng.random_range(0.25..0.75);
    while times.iter().any(|t| (t - c).abs() < 1e-3) {
        c = rng.random_range(0.25..0.75);
    }
    let left = rs_index(&Restricted::new(&a, 0.0, c)?, &Restricted::new(&b, 0.0, c)?)?;
    let right = rs_index(&Restricted::new(&a, c, 1.0)?, &Restricted::new(&b, c, 1.0)?)?;
    Ok(compare("concatenation", rs_index(&a, &b)?, left + right))
}

fn product(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let (n1, n2) = (rng.random_range(1..=2), 1);
    let (a1, b1) = (random_path(rng, n1)?, random_path(rng, n1)?);
    let (a2, b2) = (random_path(rng, n2)?, random_path(rng, n2)?);
    let sum = rs_index(&DirectSumPath::new(&a1, &a2)?, &DirectSumPath::new(&b1, &b2)?)?;
    Ok(compare("product", sum, rs_index(&a1, &b1)? + rs_index(&a2, &b2)?))
}

fn signature(a: &Mat) -> i64 {
    let e = a.clone().symmetric_eigenvalues();
    e.iter().filter(|v| **v > 0.0).count() as i64 - e.iter().filter(|v| **v < 0.0).count() as i64
}

/// `mu(Gr A(t), R^n x 0) = (sign A(1) - sign A(0)) / 2` for `A(t) = (1-t) A_0 + t A_1`.
fn localization(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let n = rng.random_range(1..=3);
    let (a0, a1) = (random_symmetric(rng, n, 1.0), random_symmetric(rng, n, 1.0));
    let (s0, s1) = (signature(&a0), signature(&a1));
    let path = FnPath::new(n, (0.0, 1.0), move |t| {
        let a = &a0 * (1.0 - t) + &a1 * t;
        let mut m = Mat::zeros(2 * n, n);
        m.view_mut((0, 0), (n, n)).fill_with_identity();
        m.view_mut((n, 0), (n, n)).copy_from(&a);
        m
    })?;
    let lhs = rs_index(&path, &ConstantPath::unit(LagrangianFrame::horizontal(n)))?;
    Ok(compare("localization", lhs, HalfInt::from_halves(s1 - s0)))
}

fn reparametrization(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let n = rng.random_range(1..=2);
    let (a, b) = (random_path(rng, n)?, random_path(rng, n)?);
    let s = rng.random_range(-0.9..0.9);
    let phi = move |t: f64| t + s * (std::f64::consts::TAU * t).sin() / std::f64::consts::TAU;
    let lhs = rs_index(&Reparametrized::new(&a, (0.0, 1.0), phi)?, &Reparametrized::new(&b, (0.0, 1.0), phi)?)?;
    Ok(compare("reparametrization", lhs, rs_index(&a, &b)?))
}

fn loop_consistency(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let n = rng.random_range(1..=2);
    let (lp, expected) = random_loop(rng, n)?;
    let v = random_lagrangian(rng, n)?;
    let w = det2_winding(&lp)?;
    let rs = rs_index_against(&lp, &v)?;
    if w != expected {
        return Ok(Some(format!("winding {w} != {expected}")));
    }
    Ok(compare("loop", rs, HalfInt::from_int(w)))
}

type Draw = fn(&mut ChaCha8Rng) -> Result<Option<String>>;

fn run(name: &str, stream: u64, draw: Draw, seed: u64, required: usize, max_draws: usize) -> AxiomTally {
    let mut tally = AxiomTally { axiom: name.into(), passed: 0, failed: 0, skipped: 0, failures: vec![], required };
    let mut next = 0;
    while tally.passed + tally.failed < required && next < max_draws {
        let batch = (required - tally.passed - tally.failed).max(8).min(max_draws - next);
        let outcomes: Vec<Outcome> = (next..next + batch)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream << 32 | i as u64);
                judge(draw(&mut rng))
            })
            .collect();
        next += batch;
        for (i, o) in outcomes.into_iter().enumerate() {
            if tally.passed + tally.failed >= required {
                break;
            }
            match o {
                Outcome::Pass => tally.passed += 1,
                Outcome::Skip => tally.skipped += 1,
                Outcome::Fail(msg) => {
                    tally.failed += 1;
                    tally.failures.push(format!("draw {}: {msg}", next - batch + i));
                }
            }
        }
    }
    tally
}

/// Naturality, concatenation, product, localization and reparametrization on random generator
/// paths, and `rs_index = det2_winding` on random loops.
pub fn axiom_suite(seed: u64, cfg: &AxiomConfig) -> Vec<AxiomTally> {
    let cases: [(&str, Draw, usize); 6] = [
        ("naturality", naturality, cfg.samples),
        ("concatenation", concatenation, cfg.samples),
        ("product", product, cfg.samples),
        ("localization", localization, cfg.samples),
        ("reparametrization", reparametrization, cfg.samples),
        ("loop", loop_consistency, cfg.loops),
    ];
    cases
        .iter()
        .enumerate()
        .map(|(s, (name, draw, req))| run(name, s as u64 + 1, *draw, seed, *req, cfg.max_draws))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::FramePath;

    #[test]
    fn small_suite_passes() {
        let cfg = AxiomConfig { samples: 6, loops: 6, max_draws: 40 };
        for t in axiom_suite(7, &cfg) {
            assert!(t.pass(), "{t:?}");
        }
    }

    #[test]
    fn deterministic() {
        let cfg = AxiomConfig { samples: 3, loops: 3, max_draws: 20 };
        assert_eq!(axiom_suite(1, &cfg), axiom_suite(1, &cfg));
    }

    #[test]
    fn loops_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (lp, w) = random_loop(&mut rng, 2).unwrap();
        assert_eq!(det2_winding(&lp).unwrap(), w);
        let _ = lp.frame_at(0.5);
    }
}
