use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::path::{FactorSpec, GeneratorPath, Schedule};
use super::{omega_matrix, Mat, BILINEAR_TOL, RANK_TOL};
use crate::error::{Error, Result};

/// A `2n x n` real frame whose columns span a Lagrangian subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame {
    n: usize,
    columns: Mat,
}

impl LagrangianFrame {
    /// Validates shape, rank and isotropy.
    pub fn new(columns: Mat) -> Result<Self> {
        let (rows, cols) = columns.shape();
        if rows != 2 * cols || cols == 0 {
            return Err(Error::Dimension(format!("a Lagrangian frame is 2n x n, got {rows}x{cols}")));
        }
        let q = orthonormal_frame(&columns)?;
        let defect = isotropy_defect(&q);
        if defect > BILINEAR_TOL {
            return Err(Error::NotLagrangian { defect, tolerance: BILINEAR_TOL });
        }
        Ok(Self { n: cols, columns })
    }

    pub(crate) fn new_unchecked(columns: Mat) -> Self {
        Self { n: columns.ncols(), columns }
    }

    /// `R^n x 0`.
    pub fn horizontal(n: usize) -> Self {
        let mut m = Mat::zeros(2 * n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        Self { n, columns: m }
    }

    /// `0 x R^n`, i.e. `i R^n`.
    pub fn vertical(n: usize) -> Self {
        let mut m = Mat::zeros(2 * n, n);
        for i in 0..n {
            m[(n + i, i)] = 1.0;
        }
        Self { n, columns: m }
    }

    /// `(e^{i theta_1} R) x ... x (e^{i theta_n} R)`.
    pub fn rotated(angles: &[f64]) -> Self {
        let n = angles.len();
        let mut m = Mat::zeros(2 * n, n);
        for (i, th) in angles.iter().enumerate() {
            m[(i, i)] = th.cos();
            m[(n + i, i)] = th.sin();
        }
        Self { n, columns: m }
    }

    /// Graph `{(x, A x)}` of a symmetric matrix `A`.
    pub fn graph(a: &Mat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension("graph of a non-square matrix".into()));
        }
        if (a - a.transpose()).amax() > BILINEAR_TOL * (1.0 + a.amax()) {
            return Err(Error::InvalidParameter("graph matrix must be symmetric".into()));
        }
        let mut m = Mat::zeros(2 * n, n);
        m.view_mut((0, 0), (n, n)).fill_with_identity();
        m.view_mut((n, 0), (n, n)).copy_from(a);
        Ok(Self { n, columns: m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &Mat {
        &self.columns
    }

    pub fn into_columns(self) -> Mat {
        self.columns
    }

    pub fn orthonormal(&self) -> Mat {
        orthonormal_frame(&self.columns).expect("validated frame has full rank")
    }

    /// Direct sum in `R^{2(n+m)}`, keeping the `(x.., y..)` coordinate order.
    pub fn direct_sum(&self, other: &LagrangianFrame) -> LagrangianFrame {
        LagrangianFrame::new_unchecked(direct_sum_frames(&self.columns, &other.columns))
    }

    /// The unitary `n x n` matrix `X + iY` of the orthonormalized frame.
    pub fn unitary(&self) -> DMatrix<Complex64> {
        unitary_of(&self.orthonormal())
    }

    /// True if both frames span the same subspace.
    pub fn same_subspace(&self, other: &LagrangianFrame) -> Result<bool> {
        Ok(lagrangian_intersection_dim(self, other)? == self.n)
    }
}

/// Direct sum of two frames given in `(x.., y..)` coordinates.
pub(crate) fn direct_sum_frames(a: &Mat, b: &Mat) -> Mat {
    let (n1, n2) = (a.ncols(), b.ncols());
    let n = n1 + n2;
    let mut m = Mat::zeros(2 * n, n);
    m.view_mut((0, 0), (n1, n1)).copy_from(&a.rows(0, n1));
    m.view_mut((n, 0), (n1, n1)).copy_from(&a.rows(n1, n1));
    m.view_mut((n1, n1), (n2, n2)).copy_from(&b.rows(0, n2));
    m.view_mut((n + n1, n1), (n2, n2)).copy_from(&b.rows(n2, n2));
    m
}

pub(crate) fn unitary_of(q: &Mat) -> DMatrix<Complex64> {
    let n = q.ncols();
    DMatrix::from_fn(n, n, |r, c| Complex64::new(q[(r, c)], q[(n + r, c)]))
}

/// Orthonormal basis (thin QR) for the column span of a full-rank frame.
pub fn orthonormal_frame(z: &Mat) -> Result<Mat> {
    let svd = z.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOL * smax.max(1.0)) {
        return Err(Error::DegenerateFrame(format!("smallest singular value {smin:e}")));
    }
    Ok(z.clone().qr().q())
}

/// `max |Q^T J0 Q|` for an orthonormal frame `Q`.
pub fn isotropy_defect(q: &Mat) -> f64 {
    let j = omega_matrix(q.nrows() / 2);
    (q.transpose() * j * q).amax()
}

/// `dim(L1 cap L2) = 2n - rank[L1 | L2]`.
pub fn lagrangian_intersection_dim(l1: &LagrangianFrame, l2: &LagrangianFrame) -> Result<usize> {
    if l1.n() != l2.n() {
        return Err(Error::Dimension(format!("n = {} vs n = {}", l1.n(), l2.n())));
    }
    let n = l1.n();
    let (q1, q2) = (orthonormal_frame(l1.columns())?, orthonormal_frame(l2.columns())?);
    let mut m = Mat::zeros(2 * n, 2 * n);
    m.columns_mut(0, n).copy_from(&q1);
    m.columns_mut(n, n).copy_from(&q2);
    let sv = m.svd(false, false).singular_values;
    let rank = sv.iter().filter(|&&s| s > RANK_TOL).count();
    Ok(2 * n - rank)
}

/// `det(U)^2` for the unitary frame `U = X + iY` of `L`.
pub fn det_squared(l: &LagrangianFrame) -> Complex64 {
    let d = l.unitary().determinant();
    let d2 = d * d;
    d2 / d2.norm()
}

/// `t -> A^{-1} (e^{-i pi t / 2} R)^n` for transverse `L0`, `L1`.
///
/// `A^{-1} = [Q0 | F]` where `Q0` is an orthonormal basis of `L0` and `F`
/// the basis of `L1` dual to it under `omega`; then `A L0 = R^n x 0` and
/// `A L1 = 0 x R^n`.
pub fn canonical_short_path(l0: &LagrangianFrame, l1: &LagrangianFrame) -> Result<GeneratorPath> {
    let n = l0.n();
    let k = lagrangian_intersection_dim(l0, l1)?;
    if k != 0 {
        return Err(Error::NotTransverse(k));
    }
    let q0 = l0.orthonormal();
    let q1 = l1.orthonormal();
    let gram = q0.transpose() * omega_matrix(n) * &q1;
    let inv = gram.try_inverse().ok_or(Error::NotTransverse(1))?;
    let f = q1 * inv;
    let mut b = Mat::zeros(2 * n, 2 * n);
    b.columns_mut(0, n).copy_from(&q0);
    b.columns_mut(n, n).copy_from(&f);
    let rotation = FactorSpec::Exponential {
        generator: Mat::identity(2 * n, 2 * n),
        schedule: Schedule::Polynomial(vec![0.0, -std::f64::consts::FRAC_PI_2]),
    };
    GeneratorPath::new(LagrangianFrame::horizontal(n), vec![FactorSpec::Constant(b), rotation], (0.0, 1.0))
}

#[derive(Serialize, Deserialize)]
struct FrameJson {
    n: usize,
    columns: Vec<Vec<f64>>,
}

impl Serialize for LagrangianFrame {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let columns = self.columns.column_iter().map(|c| c.iter().copied().collect()).collect();
        FrameJson { n: self.n, columns }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LagrangianFrame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FrameJson::deserialize(d)?;
        if raw.columns.len() != raw.n || raw.columns.iter().any(|c| c.len() != 2 * raw.n) {
            return Err(serde::de::Error::custom("frame must have n columns of length 2n"));
        }
        let m = Mat::from_fn(2 * raw.n, raw.n, |r, c| raw.columns[c][r]);
        LagrangianFrame::new(m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::FramePath;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn frame(n: usize, cols: &[&[f64]]) -> LagrangianFrame {
        LagrangianFrame::new(Mat::from_fn(2 * n, n, |r, c| cols[c][r])).unwrap()
    }

    #[test]
    fn intersection_dims() {
        let h = LagrangianFrame::horizontal(2);
        let v = LagrangianFrame::vertical(2);
        assert_eq!(lagrangian_intersection_dim(&h, &h).unwrap(), 2);
        assert_eq!(lagrangian_intersection_dim(&h, &v).unwrap(), 0);
        // span{e_x1, e_y2}
        let mixed = frame(2, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        assert_eq!(lagrangian_intersection_dim(&mixed, &h).unwrap(), 1);
        assert_eq!(lagrangian_intersection_dim(&h, &mixed).unwrap(), 1);
    }

    #[test]
    fn non_lagrangian_rejected() {
        // span{e_x1, e_y1} is symplectic, not isotropic
        let m = Mat::from_fn(4, 2, |r, c| if (c == 0 && r == 0) || (c == 1 && r == 2) { 1.0 } else { 0.0 });
        assert!(matches!(LagrangianFrame::new(m), Err(Error::NotLagrangian { .. })));
        assert!(matches!(LagrangianFrame::new(Mat::zeros(4, 2)), Err(Error::DegenerateFrame(_))));
        assert!(matches!(LagrangianFrame::new(Mat::zeros(3, 2)), Err(Error::Dimension(_))));
    }

    #[test]
    fn det_squared_of_lines() {
        let d = det_squared(&LagrangianFrame::horizontal(3));
        assert!((d - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for th in [0.3, 1.2, -2.5] {
            let d = det_squared(&LagrangianFrame::rotated(&[th]));
            assert!((d - Complex64::from_polar(1.0, 2.0 * th)).norm() < 1e-12);
        }
    }

    #[test]
    fn det_squared_ignores_frame_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let angles: Vec<f64> = (0..3).map(|_| rng.random_range(-PI..PI)).collect();
            let l = LagrangianFrame::rotated(&angles);
            let g = Mat::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0)) + Mat::identity(3, 3) * 2.0;
            let l2 = LagrangianFrame::new(l.columns() * g).unwrap();
            assert!((det_squared(&l) - det_squared(&l2)).norm() < 1e-9);
        }
    }

    #[test]
    fn short_path_standard_pair() {
        let n = 2;
        let p = canonical_short_path(&LagrangianFrame::horizontal(n), &LagrangianFrame::vertical(n)).unwrap();
        let f0 = LagrangianFrame::new(p.frame_at(0.0)).unwrap();
        let f1 = LagrangianFrame::new(p.frame_at(1.0)).unwrap();
        assert!(f0.same_subspace(&LagrangianFrame::horizontal(n)).unwrap());
        assert!(f1.same_subspace(&LagrangianFrame::vertical(n)).unwrap());
        // (e^{-i pi t/2} R)^n at t = 1/2
        let mid = LagrangianFrame::new(p.frame_at(0.5)).unwrap();
        assert!(mid.same_subspace(&LagrangianFrame::rotated(&[-PI / 4.0, -PI / 4.0])).unwrap());
    }

    #[test]
    fn short_path_to_diagonal() {
        let l0 = frame(1, &[&[1.0, 0.0]]);
        let l1 = frame(1, &[&[1.0, 1.0]]);
        let p = canonical_short_path(&l0, &l1).unwrap();
        let f0 = LagrangianFrame::new(p.frame_at(0.0)).unwrap();
        let f1 = LagrangianFrame::new(p.frame_at(1.0)).unwrap();
        assert_eq!(lagrangian_intersection_dim(&f0, &l0).unwrap(), 1);
        assert_eq!(lagrangian_intersection_dim(&f1, &l1).unwrap(), 1);
    }

    #[test]
    fn short_path_requires_transverse() {
        let h = LagrangianFrame::horizontal(1);
        assert!(matches!(canonical_short_path(&h, &h), Err(Error::NotTransverse(1))));
    }

    #[test]
    fn frame_json_shape() {
        let f = LagrangianFrame::vertical(1);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"n":1,"columns":[[0.0,1.0]]}"#);
        let back: LagrangianFrame = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<LagrangianFrame>(r#"{"n":1,"columns":[[1.0,0.0,0.0]]}"#).is_err());
    }
}
