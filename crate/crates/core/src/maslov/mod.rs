//! Robbin-Salamon indices of Lagrangian paths, Maslov indices of chords and
//! the `det^2` winding number of loops.

mod crossing;
mod halfint;

pub use crossing::{crossings_against, rs_index_against, Crossing, CROSSING_TOL, MERGE_TOL};
pub use halfint::HalfInt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symplin::{det_squared, lagrangian_intersection_dim, FramePath, LagrangianFrame, Mat};

/// `Lambda_0(t) x Lambda_1(t)` in `(R^2n (+) R^2n, omega (+) -omega)`, carried to the
/// standard form on `R^4n` by conjugating the second factor with `(x, y) -> (x, -y)`.
struct PairGraph<'a, A: ?Sized, B: ?Sized> {
    l0: &'a A,
    l1: &'a B,
}

impl<A: FramePath + ?Sized, B: FramePath + ?Sized> FramePath for PairGraph<'_, A, B> {
    fn n(&self) -> usize {
        2 * self.l0.n()
    }
    fn domain(&self) -> (f64, f64) {
        self.l0.domain()
    }
    fn frame_at(&self, t: f64) -> Mat {
        let n = self.l0.n();
        let (z0, z1) = (self.l0.frame_at(t), self.l1.frame_at(t));
        let mut m = Mat::zeros(4 * n, 2 * n);
        // rows: x, x', y, y'
        m.view_mut((0, 0), (n, n)).copy_from(&z0.rows(0, n));
        m.view_mut((2 * n, 0), (n, n)).copy_from(&z0.rows(n, n));
        m.view_mut((n, n), (n, n)).copy_from(&z1.rows(0, n));
        m.view_mut((3 * n, n), (n, n)).copy_from(&(-z1.rows(n, n)));
        m
    }
    fn sample_resolution(&self) -> usize {
        self.l0.sample_resolution().max(self.l1.sample_resolution())
    }
}

/// The diagonal of `R^2n (+) R^2n` in the conjugated coordinates of [`PairGraph`].
fn conjugated_diagonal(n: usize) -> LagrangianFrame {
    let mut m = Mat::zeros(4 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = 1.0;
        m[(n + i, i)] = 1.0;
        m[(2 * n + i, n + i)] = 1.0;
        m[(3 * n + i, n + i)] = -1.0;
    }
    LagrangianFrame::new(m).expect("diagonal is Lagrangian")
}

fn check_pair<A: FramePath + ?Sized, B: FramePath + ?Sized>(l0: &A, l1: &B) -> Result<()> {
    if l0.n() != l1.n() {
        return Err(Error::Dimension(format!("paths have n = {} and n = {}", l0.n(), l1.n())));
    }
    let (d0, d1) = (l0.domain(), l1.domain());
    if (d0.0 - d1.0).abs() > 1e-12 || (d0.1 - d1.1).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("domains [{}, {}] and [{}, {}] differ", d0.0, d0.1, d1.0, d1.1)));
    }
    Ok(())
}

/// Crossings of the pair `(Lambda_0, Lambda_1)`: times where they intersect, with the
/// crossing form `Q_0 - Q_1` on the intersection.
pub fn pair_crossings<A: FramePath + ?Sized, B: FramePath + ?Sized>(l0: &A, l1: &B) -> Result<Vec<Crossing>> {
    check_pair(l0, l1)?;
    crossings_against(&PairGraph { l0, l1 }, &conjugated_diagonal(l0.n()))
}

/// `mu_RS(Lambda_0, Lambda_1)`.
pub fn rs_index<A: FramePath + ?Sized, B: FramePath + ?Sized>(l0: &A, l1: &B) -> Result<HalfInt> {
    check_pair(l0, l1)?;
    rs_index_against(&PairGraph { l0, l1 }, &conjugated_diagonal(l0.n()))
}

/// `mu(x) = mu_RS(Lambda_0, Lambda_1) - n/2` for a chord with linearized flow path
/// `Lambda_0` and reference path `Lambda_1`.
pub fn chord_maslov<A: FramePath + ?Sized, B: FramePath + ?Sized>(
    flow_path: &A,
    reference: &B,
    n: usize,
) -> Result<HalfInt> {
    if flow_path.n() != n {
        return Err(Error::Dimension(format!("flow path has n = {}, expected {}", flow_path.n(), n)));
    }
    Ok(rs_index(flow_path, reference)? - HalfInt::from_halves(n as i64))
}

const MAX_BISECTIONS: u32 = 48;

/// Winding number of `t -> det^2(loop(t))` around the origin.
pub fn det2_winding<P: FramePath + ?Sized>(lp: &P) -> Result<i64> {
    let (a, b) = lp.domain();
    let start = lp.lagrangian_at(a)?;
    let end = lp.lagrangian_at(b)?;
    let found = lagrangian_intersection_dim(&start, &end)?;
    if found != lp.n() {
        return Err(Error::NotALoop { found, expected: lp.n() });
    }
    let d = |t: f64| -> Result<Complex64> { Ok(det_squared(&lp.lagrangian_at(t)?)) };
    let m = lp.sample_resolution().max(16);
    let mut total = 0.0;
    let mut t0 = a;
    let mut z0 = d(a)?;
    for i in 1..=m {
        let t1 = a + (b - a) * i as f64 / m as f64;
        total += arg_increment(&d, t0, z0, t1, d(t1)?, 0)?;
        t0 = t1;
        z0 = d(t1)?;
    }
    Ok((total / std::f64::consts::TAU).round() as i64)
}

fn arg_increment(
    d: &impl Fn(f64) -> Result<Complex64>,
    t0: f64,
    z0: Complex64,
    t1: f64,
    z1: Complex64,
    depth: u32,
) -> Result<f64> {
    let step = (z1 / z0).arg();
    if step.abs() < std::f64::consts::FRAC_PI_2 {
        return Ok(step);
    }
    if depth >= MAX_BISECTIONS {
        return Err(Error::Integration(format!("det^2 jumps by {step} on [{t0}, {t1}] after refinement")));
    }
    let tm = 0.5 * (t0 + t1);
    let zm = d(tm)?;
    Ok(arg_increment(d, t0, z0, tm, zm, depth + 1)? + arg_increment(d, tm, zm, t1, z1, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::{ConstantPath, DirectSumPath, GeneratorPath, Schedule};
    use std::f64::consts::PI;

    fn rotation(c: f64) -> GeneratorPath {
        GeneratorPath::hamiltonian(LagrangianFrame::horizontal(1), Mat::identity(2, 2), Schedule::linear(c), (0.0, 1.0))
            .unwrap()
    }

    #[test]
    fn quadratic_model_index() {
        let v = ConstantPath::unit(LagrangianFrame::horizontal(1));
        for k in 0..5 {
            let p = rotation((k as f64 + 0.5) * PI);
            assert_eq!(rs_index(&p, &v).unwrap(), HalfInt::from_halves(2 * k + 1));
            assert_eq!(chord_maslov(&p, &v, 1).unwrap(), HalfInt::from_int(k));
        }
    }

    #[test]
    fn pair_index_matches_fixed_reference() {
        let p = rotation(2.3 * PI);
        let v = LagrangianFrame::rotated(&[0.4]);
        assert_eq!(rs_index(&p, &ConstantPath::unit(v.clone())).unwrap(), rs_index_against(&p, &v).unwrap());
    }

    #[test]
    fn swapping_the_pair_negates() {
        let p = rotation(1.7 * PI);
        let q = GeneratorPath::hamiltonian(
            LagrangianFrame::rotated(&[0.3]),
            Mat::identity(2, 2),
            Schedule::linear(-0.4 * PI),
            (0.0, 1.0),
        )
        .unwrap();
        assert_eq!(rs_index(&p, &q).unwrap(), -rs_index(&q, &p).unwrap());
    }

    #[test]
    fn constant_transverse_pair() {
        let a = ConstantPath::unit(LagrangianFrame::horizontal(2));
        let b = ConstantPath::unit(LagrangianFrame::vertical(2));
        assert_eq!(rs_index(&a, &b).unwrap(), HalfInt::ZERO);
        assert_eq!(chord_maslov(&a, &b, 2).unwrap(), HalfInt::from_halves(-2));
    }

    #[test]
    fn graph_of_t_identity() {
        let n = 3;
        let p = crate::symplin::FnPath::new(n, (0.0, 1.0), move |t| {
            let mut m = Mat::zeros(2 * n, n);
            for i in 0..n {
                m[(i, i)] = 1.0;
                m[(n + i, i)] = t;
            }
            m
        })
        .unwrap();
        let v = ConstantPath::unit(LagrangianFrame::horizontal(n));
        assert_eq!(rs_index(&p, &v).unwrap(), HalfInt::from_halves(n as i64));
    }

    #[test]
    fn windings() {
        assert_eq!(det2_winding(&ConstantPath::unit(LagrangianFrame::vertical(2))).unwrap(), 0);
        assert_eq!(det2_winding(&rotation(PI)).unwrap(), 1);
        assert_eq!(det2_winding(&rotation(-3.0 * PI)).unwrap(), -3);
        let sum = DirectSumPath::new(rotation(PI), rotation(-PI)).unwrap();
        assert_eq!(det2_winding(&sum).unwrap(), 0);
        assert!(matches!(det2_winding(&rotation(0.5 * PI)), Err(Error::NotALoop { .. })));
    }

    #[test]
    fn loop_index_equals_winding() {
        for m in [-2.0, -1.0, 1.0, 3.0] {
            let p = rotation(m * PI);
            let rs = rs_index_against(&p, &LagrangianFrame::rotated(&[0.7])).unwrap();
            assert_eq!(rs, HalfInt::from_int(det2_winding(&p).unwrap()));
        }
    }
}
