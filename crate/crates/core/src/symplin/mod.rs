//! Linear symplectic algebra on (R^{2n}, omega_st).
//!
//! Coordinates are ordered `(x_1..x_n, y_1..y_n)` and `omega_st = sum dx_i ^ dy_i`,
//! so `omega(u, v) = u^T J0 v` with `J0 = [[0, I], [-I, 0]]`. The complex
//! structure is `J(x, y) = (-y, x)`, i.e. multiplication by `i` under
//! `z_j = x_j + i y_j`. With these choices `omega(u, J v) = <u, v>`.

mod frame;
mod path;

pub use frame::{
    canonical_short_path, det_squared, isotropy_defect, lagrangian_intersection_dim, orthonormal_frame, LagrangianFrame,
};
pub use path::{
    ConstantPath, DirectSumPath, FactorSpec, FnPath, FramePath, GeneratorPath, LagrangianPath, Reparametrized,
    Restricted, SampledPath, Schedule, TransformedPath,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;

/// Tolerance for bilinear identities (isotropy, symplecticity).
pub const BILINEAR_TOL: f64 = 1e-10;
/// Singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

/// Matrix of `omega_st`: `[[0, I], [-I, 0]]`.
pub fn omega_matrix(n: usize) -> Mat {
    let mut m = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        m[(n + i, i)] = -1.0;
    }
    m
}

/// Matrix of the complex structure `J(x, y) = (-y, x)`.
pub fn complex_structure(n: usize) -> Mat {
    -omega_matrix(n)
}

/// The standard symplectic form on R^{2n}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticForm {
    n: usize,
    #[serde(with = "path::mat_rows")]
    matrix: Mat,
}

impl SymplecticForm {
    pub fn standard(n: usize) -> Self {
        Self { n, matrix: omega_matrix(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.n;
        (0..n).map(|i| u[i] * v[n + i] - u[n + i] * v[i]).sum()
    }
}

/// A real `2n x 2n` matrix, nominally symplectic.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    m: Mat,
}

impl SymplecticMatrix {
    /// Wraps `m`, checking that it is symplectic to within [`BILINEAR_TOL`].
    pub fn new(m: Mat) -> Result<Self> {
        if !is_symplectic(&m)? {
            return Err(Error::InvalidParameter("matrix is not symplectic".into()));
        }
        Ok(Self { n: m.nrows() / 2, m })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, m: Mat::identity(2 * n, 2 * n) }
    }

    /// `exp(s J S)` for a symmetric `S`; always symplectic.
    pub fn exp_hamiltonian(s: f64, generator: &Mat) -> Result<Self> {
        let n2 = generator.nrows();
        if n2 % 2 != 0 || generator.ncols() != n2 {
            return Err(Error::Dimension(format!(
                "generator must be square of even size, got {}x{}",
                n2,
                generator.ncols()
            )));
        }
        let a = complex_structure(n2 / 2) * generator * s;
        Ok(Self { n: n2 / 2, m: a.exp() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn into_matrix(self) -> Mat {
        self.m
    }

    /// `M^{-1} = -J0 M^T J0`.
    pub fn inverse(&self) -> Self {
        let j = omega_matrix(self.n);
        Self { n: self.n, m: -(&j * self.m.transpose() * &j) }
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Self {
        Self { n: self.n, m: &self.m * &other.m }
    }

    pub fn apply(&self, frame: &LagrangianFrame) -> Result<LagrangianFrame> {
        if frame.n() != self.n {
            return Err(Error::Dimension(format!("matrix acts on n = {}, frame has n = {}", self.n, frame.n())));
        }
        LagrangianFrame::new(&self.m * frame.columns())
    }
}

/// True iff `||M^T J0 M - J0||_max < 1e-10`.
pub fn is_symplectic(m: &Mat) -> Result<bool> {
    let (r, c) = m.shape();
    if r != c || r % 2 != 0 || r == 0 {
        return Err(Error::Dimension(format!("expected a square matrix of positive even size, got {r}x{c}")));
    }
    let j = omega_matrix(r / 2);
    let defect = (m.transpose() * &j * m - &j).amax();
    Ok(defect < BILINEAR_TOL)
}

/// Block-diagonal symmetric matrix in standard coordinates from per-plane 2x2 blocks.
///
/// Block `i` acts on the `(x_i, y_i)` plane.
pub fn planar_blocks(blocks: &[[[f64; 2]; 2]]) -> Mat {
    let n = blocks.len();
    let mut m = Mat::zeros(2 * n, 2 * n);
    for (i, b) in blocks.iter().enumerate() {
        let idx = [i, n + i];
        for r in 0..2 {
            for c in 0..2 {
                m[(idx[r], idx[c])] = b[r][c];
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_symplectic() {
        assert!(is_symplectic(&Mat::identity(4, 4)).unwrap());
    }

    #[test]
    fn area_preserving_scaling() {
        let m = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        assert!(is_symplectic(&m).unwrap());
        let m = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(!is_symplectic(&m).unwrap());
    }

    #[test]
    fn odd_dimension_rejected() {
        assert!(matches!(is_symplectic(&Mat::identity(3, 3)), Err(Error::Dimension(_))));
        assert!(matches!(is_symplectic(&Mat::zeros(2, 4)), Err(Error::Dimension(_))));
    }

    #[test]
    fn omega_pairs_x_with_y() {
        let w = SymplecticForm::standard(2);
        assert_eq!(w.eval(&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]), 1.0);
        assert_eq!(w.eval(&[0.0, 0.0, 1.0, 0.0], &[1.0, 0.0, 0.0, 0.0]), -1.0);
        let u = nalgebra::DVector::from_vec(vec![0.3, -1.0, 2.0, 0.7]);
        let v = nalgebra::DVector::from_vec(vec![1.1, 0.4, -0.2, 0.9]);
        // omega(u, J v) = <u, v>
        let jv = complex_structure(2) * &v;
        assert!((w.eval(u.as_slice(), jv.as_slice()) - u.dot(&v)).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_exponential_is_symplectic_and_inverts() {
        let s = Mat::from_row_slice(
            4,
            4,
            &[
                1.0, 0.2, -0.3, 0.0, //
                0.2, -0.5, 0.1, 0.4, //
                -0.3, 0.1, 0.7, 0.2, //
                0.0, 0.4, 0.2, -1.0,
            ],
        );
        let m = SymplecticMatrix::exp_hamiltonian(0.8, &s).unwrap();
        assert!(is_symplectic(m.matrix()).unwrap());
        let id = m.compose(&m.inverse());
        assert!((id.matrix() - Mat::identity(4, 4)).amax() < 1e-12);
    }
}
