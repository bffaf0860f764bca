use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::HalfInt;
use crate::error::{Error, Result};
use crate::symplin::{complex_structure, omega_matrix, orthonormal_frame, FramePath, LagrangianFrame, Mat};

/// Below this smallest principal-angle sine the path meets the reference.
pub const CROSSING_TOL: f64 = 1e-8;
/// Crossings closer than this are the same crossing.
pub const MERGE_TOL: f64 = 1e-9;
/// Singular values below this count toward the intersection at a located crossing.
const KERNEL_TOL: f64 = 1e-6;
/// Relative size below which a crossing-form eigenvalue counts as zero.
const DEGENERACY_TOL: f64 = 1e-7;
const REFINE_TOL: f64 = 1e-13;

/// A time at which a path meets the reference Lagrangian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub time: f64,
    pub intersection_dim: usize,
    pub crossing_form_signature: i64,
    pub regular: bool,
    /// True at an endpoint of the domain, where only half the signature counts.
    pub boundary: bool,
    /// Eigenvalues of the crossing form restricted to the intersection.
    pub eigenvalues: Vec<f64>,
}

impl Crossing {
    /// Contribution to the index: the signature at interior crossings, half of it at endpoints.
    pub fn contribution(&self) -> HalfInt {
        if self.boundary {
            HalfInt::from_halves(self.crossing_form_signature)
        } else {
            HalfInt::from_int(self.crossing_form_signature)
        }
    }
}

/// Precomputed data for measuring a path against a fixed Lagrangian `V`.
struct Reference {
    /// `Q_V^T J0`, so that `sigma_min(B Q)` is the sine of the smallest angle between `V` and `span Q`.
    b: Mat,
    /// `U_V^*` for the unitary `U_V = X + iY` of an orthonormal frame of `V`.
    uv_adj: DMatrix<Complex64>,
}

fn unitary_of_orthonormal(q: &Mat) -> DMatrix<Complex64> {
    let n = q.ncols();
    DMatrix::from_fn(n, n, |i, j| Complex64::new(q[(i, j)], q[(n + i, j)]))
}

impl Reference {
    fn new(v: &LagrangianFrame) -> Self {
        let qv = v.orthonormal();
        Self { b: qv.transpose() * omega_matrix(v.n()), uv_adj: unitary_of_orthonormal(&qv).adjoint() }
    }

    fn sigma_min(&self, q: &Mat) -> f64 {
        (&self.b * q).svd(false, false).singular_values.min()
    }

    /// Arguments of the eigenvalues of `A A^T`, `A = U_V^* U`; they vanish exactly on `V`, and
    /// each moves continuously, so a crossing shows up as one of them changing sign.
    fn angles(&self, q: &Mat) -> Vec<f64> {
        let a = &self.uv_adj * unitary_of_orthonormal(q);
        let w = &a * a.transpose();
        let schur = Schur::new(w);
        let (_, t) = schur.unpack();
        (0..t.nrows()).map(|i| t[(i, i)].arg()).collect()
    }
}

/// Angles below this are taken to be exactly zero.
const ZERO_ANGLE: f64 = 1e-12;
/// Only angles this close to zero are tracked through a cell.
const NEAR_ANGLE: f64 = 0.1;
/// Cells are split until no angle moves further than this across them.
const MAX_ANGLE_STEP: f64 = 0.05;
/// Bound on eigen-angle evaluations per path.
const MAX_ANGLE_EVALS: usize = 2_000_000;

fn circular_gap(a: f64, b: f64) -> f64 {
    ((a - b + PI).rem_euclid(TAU) - PI).abs()
}

/// Hausdorff distance between two angle multisets on the circle.
fn angle_movement(a: &[f64], b: &[f64]) -> f64 {
    let one_way = |x: &[f64], y: &[f64]| {
        x.iter().map(|&p| y.iter().map(|&q| circular_gap(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

fn small_angles(a: &[f64]) -> Vec<f64> {
    a.iter().copied().filter(|x| x.abs() < NEAR_ANGLE).collect()
}

/// Number of tracked angles that change strict sign, matching each angle at the start to the
/// nearest unused one at the end.
fn sign_events(a: &[f64], b: &[f64]) -> usize {
    let (sa, sb) = (small_angles(a), small_angles(b));
    let mut used = vec![false; sb.len()];
    let mut events = 0;
    for &x in &sa {
        let best = (0..sb.len()).filter(|&k| !used[k]).min_by(|&i, &j| (sb[i] - x).abs().total_cmp(&(sb[j] - x).abs()));
        if let Some(k) = best {
            used[k] = true;
            if x.abs() > ZERO_ANGLE && sb[k].abs() > ZERO_ANGLE && x.signum() != sb[k].signum() {
                events += 1;
            }
        }
    }
    events
}

struct AngleScan<'a> {
    angles: &'a dyn Fn(f64) -> Result<Vec<f64>>,
    min_cell: f64,
    evals: usize,
}

impl AngleScan<'_> {
    fn eval(&mut self, t: f64) -> Result<Vec<f64>> {
        self.evals += 1;
        if self.evals > MAX_ANGLE_EVALS {
            return Err(Error::Integration("crossing scan exceeded its evaluation budget".into()));
        }
        (self.angles)(t)
    }

    fn cell(&mut self, t0: f64, a0: &[f64], t1: f64, a1: &[f64], out: &mut Vec<f64>) -> Result<()> {
        let events = sign_events(a0, a1);
        let crowded = small_angles(a0).len() > 1 || small_angles(a1).len() > 1;
        let resolved = angle_movement(a0, a1) <= MAX_ANGLE_STEP && (events == 0 || (events == 1 && !crowded));
        if !resolved && t1 - t0 > self.min_cell {
            let tm = 0.5 * (t0 + t1);
            let am = self.eval(tm)?;
            self.cell(t0, a0, tm, &am, out)?;
            return self.cell(tm, &am, t1, a1, out);
        }
        if events == 0 {
            return Ok(());
        }
        if events > 1 || crowded {
            out.push(0.5 * (t0 + t1));
            return Ok(());
        }
        // a single tracked angle changes sign: bisect on it
        let nearest = |a: &[f64]| a.iter().copied().min_by(|x, y| x.abs().total_cmp(&y.abs())).unwrap_or(0.0);
        let (mut lo, mut hi) = (t0, t1);
        let s_lo = nearest(a0).signum();
        while hi - lo > REFINE_TOL * (1.0 + lo.abs().max(hi.abs())) {
            let tm = 0.5 * (lo + hi);
            let v = nearest(&self.eval(tm)?);
            if v.abs() <= ZERO_ANGLE {
                lo = tm;
                hi = tm;
                break;
            }
            if v.signum() == s_lo {
                lo = tm;
            } else {
                hi = tm;
            }
        }
        out.push(0.5 * (lo + hi));
        Ok(())
    }
}

fn orthonormal_at<P: FramePath + ?Sized>(path: &P, t: f64) -> Result<Mat> {
    orthonormal_frame(&path.frame_at(t)).map_err(|e| match e {
        Error::DegenerateFrame(d) => Error::DegenerateFrame(format!("at t = {t}: {d}")),
        other => other,
    })
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > REFINE_TOL * (1.0 + a.abs().max(b.abs())) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Samples per sub-scan around a candidate minimum.
const SUBSCAN: usize = 64;
const SUBSCAN_DEPTH: u32 = 2;
/// Candidates with a sampled `sigma` above this cannot hide a pair of crossings worth resolving.
const SUBSCAN_BELOW: f64 = 0.5;

/// Crossings near a sampled minimum on `[lo, hi]`; re-sampled more finely first, so that
/// crossings closer than one grid cell are told apart.
fn local_minima(sigma: &impl Fn(f64) -> f64, lo: f64, hi: f64, sampled: f64, depth: u32, out: &mut Vec<f64>) {
    if depth < SUBSCAN_DEPTH && sampled < SUBSCAN_BELOW {
        let ts: Vec<f64> = (0..=SUBSCAN).map(|i| lo + (hi - lo) * i as f64 / SUBSCAN as f64).collect();
        let sig: Vec<f64> = ts.iter().map(|&t| sigma(t)).collect();
        let mut found = false;
        for i in 1..SUBSCAN {
            if sig[i] <= sig[i - 1] && sig[i] < sig[i + 1] {
                found = true;
                local_minima(sigma, ts[i - 1], ts[i + 1], sig[i], depth + 1, out);
            }
        }
        if found {
            return;
        }
    }
    let (t, s) = golden_min(sigma, lo, hi);
    if s < CROSSING_TOL {
        out.push(t);
    }
}

/// Times at which `path` meets `v`, located to ~1e-12.
fn crossing_times<P: FramePath + ?Sized>(path: &P, reference: &Reference) -> Result<Vec<f64>> {
    let (a, b) = path.domain();
    let m = path.sample_resolution().max(16);
    let ts: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
    let mut sig = Vec::with_capacity(ts.len());
    for &t in &ts {
        sig.push(reference.sigma_min(&orthonormal_at(path, t)?));
    }
    let sigma = |t: f64| orthonormal_at(path, t).map(|q| reference.sigma_min(&q)).unwrap_or(f64::INFINITY);

    let mut times = Vec::new();
    if sig[0] < CROSSING_TOL {
        times.push(a);
    }
    // one candidate per run of equal samples: non-increasing into it, strictly increasing out
    for i in 1..m {
        if sig[i] <= sig[i - 1] && sig[i] < sig[i + 1] {
            local_minima(&sigma, ts[i - 1], ts[i + 1], sig[i], 0, &mut times);
        }
    }
    if sig[m] < CROSSING_TOL {
        times.push(b);
    }
    // sign changes of the eigen-angles catch crossings that another small angle hides from sigma_min
    let angles = |t: f64| orthonormal_at(path, t).map(|q| reference.angles(&q));
    let mut scan = AngleScan { angles: &angles, min_cell: MERGE_TOL * (b - a), evals: 0 };
    let mut prev = scan.eval(ts[0])?;
    for i in 0..m {
        let next = scan.eval(ts[i + 1])?;
        let mut found = Vec::new();
        scan.cell(ts[i], &prev, ts[i + 1], &next, &mut found)?;
        times.extend(found.into_iter().filter(|&t| sigma(t) < CROSSING_TOL));
        prev = next;
    }
    times.sort_by(f64::total_cmp);
    let span = b - a;
    let mut merged: Vec<f64> = Vec::new();
    for t in times {
        let t = if (t - a).abs() < MERGE_TOL * span.max(1.0) {
            a
        } else if (b - t).abs() < MERGE_TOL * span.max(1.0) {
            b
        } else {
            t
        };
        match merged.last() {
            Some(&last) if (t - last).abs() < MERGE_TOL * span.max(1.0) => {
                // keep an endpoint if either is one
                if t == a || t == b {
                    *merged.last_mut().unwrap() = t;
                }
            }
            _ => merged.push(t),
        }
    }
    Ok(merged)
}

/// `S(t)` with `Lambda(t) = graph(S(t))` over `Lambda(t*)` in the splitting `Lambda(t*) (+) J Lambda(t*)`.
fn graph_matrix<P: FramePath + ?Sized>(path: &P, q0: &Mat, jq0: &Mat, t: f64) -> Result<Mat> {
    let z = path.frame_at(t);
    let p = q0.transpose() * &z;
    let r = jq0.transpose() * &z;
    let pinv = p
        .try_inverse()
        .ok_or_else(|| Error::DegenerateFrame(format!("path is not a graph over itself near t = {t}")))?;
    Ok(r * pinv)
}

/// `dS/dt` at `t*` by Richardson-extrapolated finite differences (central or one-sided).
fn graph_derivative<P: FramePath + ?Sized>(path: &P, q0: &Mat, jq0: &Mat, t: f64) -> Result<Mat> {
    let (a, b) = path.domain();
    let h = 1e-6 * (b - a);
    let s = |x: f64| graph_matrix(path, q0, jq0, x);
    let deriv = |h: f64| -> Result<Mat> {
        if t - h < a {
            // forward, second order; S(t*) = 0
            Ok((s(t + h)? * 4.0 - s(t + 2.0 * h)?) / (2.0 * h))
        } else if t + h > b {
            Ok((s(t - h)? * -4.0 + s(t - 2.0 * h)?) / (2.0 * h))
        } else {
            Ok((s(t + h)? - s(t - h)?) / (2.0 * h))
        }
    };
    let d1 = deriv(h)?;
    let d2 = deriv(0.5 * h)?;
    Ok((d2 * 4.0 - d1) / 3.0)
}

fn signature_of(eigs: &[f64]) -> i64 {
    eigs.iter().map(|&e| if e > 0.0 { 1 } else { -1 }).sum()
}

fn crossing_at<P: FramePath + ?Sized>(path: &P, qv: &Mat, t: f64) -> Result<Crossing> {
    let n = path.n();
    let (a, b) = path.domain();
    let q0 = orthonormal_at(path, t)?;
    let jq0 = complex_structure(n) * &q0;
    // u in ker(Q_V^T J0 Q0) <=> Q0 u in V
    let m = qv.transpose() * omega_matrix(n) * &q0;
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let kernel: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] < KERNEL_TOL).collect();
    let dim = kernel.len();
    if dim == 0 {
        return Err(Error::IrregularCrossing { time: t, detail: "near-tangency without intersection".into() });
    }
    let k = DMatrix::from_fn(n, dim, |r, c| vt[(kernel[c], r)]);
    let sdot = graph_derivative(path, &q0, &jq0, t)?;
    let form = k.transpose() * (&sdot + sdot.transpose()) * 0.5 * &k;
    let eigs = SymmetricEigen::new(form).eigenvalues;
    let scale = sdot.amax().max(1.0);
    let regular = eigs.iter().all(|e| e.abs() > DEGENERACY_TOL * scale);
    let mut eigenvalues: Vec<f64> = eigs.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(Crossing {
        time: t,
        intersection_dim: dim,
        crossing_form_signature: signature_of(&eigenvalues),
        regular,
        boundary: t == a || t == b,
        eigenvalues,
    })
}

/// All crossings of `path` with the fixed Lagrangian `v`, regular or not.
pub fn crossings_against<P: FramePath + ?Sized>(path: &P, v: &LagrangianFrame) -> Result<Vec<Crossing>> {
    if path.n() != v.n() {
        return Err(Error::Dimension(format!("path has n = {}, reference has n = {}", path.n(), v.n())));
    }
    let reference = Reference::new(v);
    let qv = v.orthonormal();
    crossing_times(path, &reference)?.into_iter().map(|t| crossing_at(path, &qv, t)).collect()
}

/// Robbin-Salamon index of `path` relative to the constant Lagrangian `v`.
pub fn rs_index_against<P: FramePath + ?Sized>(path: &P, v: &LagrangianFrame) -> Result<HalfInt> {
    let crossings = crossings_against(path, v)?;
    if let Some(c) = crossings.iter().find(|c| !c.regular) {
        return Err(Error::IrregularCrossing {
            time: c.time,
            detail: format!(
                "crossing form eigenvalues {:?} on a {}-dimensional intersection",
                c.eigenvalues, c.intersection_dim
            ),
        });
    }
    Ok(crossings.iter().map(Crossing::contribution).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::{FnPath, GeneratorPath, Schedule};
    use std::f64::consts::PI;

    fn graph_path(a0: Vec<f64>, a1: Vec<f64>) -> FnPath {
        let n = a0.len();
        FnPath::new(n, (0.0, 1.0), move |t| {
            let mut m = Mat::zeros(2 * n, n);
            for i in 0..n {
                m[(i, i)] = 1.0;
                m[(n + i, i)] = (1.0 - t) * a0[i] + t * a1[i];
            }
            m
        })
        .unwrap()
    }

    #[test]
    fn localization_on_diagonal_graphs() {
        let h = LagrangianFrame::horizontal(3);
        // A(t) = t I: boundary crossing at 0 with form I
        assert_eq!(rs_index_against(&graph_path(vec![0.0; 3], vec![1.0; 3]), &h).unwrap(), HalfInt::from_halves(3));
        // A from diag(-1, 2, -3) to diag(1, 2, 1): two interior sign changes upward
        let p = graph_path(vec![-1.0, 2.0, -3.0], vec![1.0, 2.0, 1.0]);
        assert_eq!(rs_index_against(&p, &h).unwrap(), HalfInt::from_int(2));
        // 1/2 sign A(1) - 1/2 sign A(0)
        let p = graph_path(vec![0.5, -1.0], vec![-2.0, 3.0]);
        assert_eq!(rs_index_against(&p, &LagrangianFrame::horizontal(2)).unwrap(), HalfInt::ZERO);
    }

    #[test]
    fn rotation_counts_half_turns() {
        for k in 0..4 {
            let c = (k as f64 + 0.5) * PI;
            let p = GeneratorPath::hamiltonian(
                LagrangianFrame::horizontal(1),
                Mat::identity(2, 2),
                Schedule::linear(c),
                (0.0, 1.0),
            )
            .unwrap();
            let cs = crossings_against(&p, &LagrangianFrame::horizontal(1)).unwrap();
            assert_eq!(cs.len(), k + 1);
            assert!(cs[0].boundary);
            assert_eq!(
                rs_index_against(&p, &LagrangianFrame::horizontal(1)).unwrap(),
                HalfInt::from_halves(2 * k as i64 + 1)
            );
        }
    }

    #[test]
    fn clockwise_rotation_is_negative() {
        let p = GeneratorPath::hamiltonian(
            LagrangianFrame::horizontal(1),
            Mat::identity(2, 2),
            Schedule::linear(-1.5 * PI),
            (0.0, 1.0),
        )
        .unwrap();
        assert_eq!(rs_index_against(&p, &LagrangianFrame::horizontal(1)).unwrap(), HalfInt::from_halves(-3));
    }

    #[test]
    fn transverse_constant_is_zero() {
        let p = graph_path(vec![1.0, 2.0], vec![1.0, 2.0]);
        assert!(crossings_against(&p, &LagrangianFrame::vertical(2)).unwrap().is_empty());
    }

    #[test]
    fn tangency_is_irregular() {
        // A(t) = (t - 1/2)^2 touches zero without changing sign
        let p = FnPath::new(1, (0.0, 1.0), |t| Mat::from_column_slice(2, 1, &[1.0, (t - 0.5) * (t - 0.5)])).unwrap();
        let err = rs_index_against(&p, &LagrangianFrame::horizontal(1)).unwrap_err();
        assert!(matches!(err, Error::IrregularCrossing { .. }), "{err:?}");
    }

    #[test]
    fn crossing_between_samples() {
        let p = graph_path(vec![-1.0], vec![1.0]).with_resolution(16);
        let cs = crossings_against(&p, &LagrangianFrame::horizontal(1)).unwrap();
        assert_eq!(cs.len(), 1);
        assert!((cs[0].time - 0.5).abs() < 1e-10);
        assert!((cs[0].eigenvalues[0] - 2.0).abs() < 1e-6);
    }
}
