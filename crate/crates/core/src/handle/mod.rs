//! The Weinstein handle model in `R^2n`: the functions `x, y, z, phi, psi_delta`,
//! the Liouville field `X = grad phi`, the Hamiltonian fields of `x, y, z`, closed-form
//! flows, and a transversality certificate for the level set `psi_delta = -1`.
//!
//! Points are stored as `(x_1..x_k, y_1..y_k, x_{k+1}, y_{k+1}, .., x_n, y_n)` and the
//! symplectic form is `sum dx_i ^ dy_i`. Hamiltonian fields satisfy `omega(X_H, .) = -dH`.

mod certificate;
mod cutoff;

pub use certificate::{transversality_certificate, transversality_value, GridSpec, TransversalityCertificate, Witness};
pub use cutoff::CutoffG;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplin::{GeneratorPath, LagrangianFrame, Mat, Schedule};

/// Parameters `(n, k, eps, delta)` of the handle model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandleParams {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
}

impl HandleParams {
    pub fn new(n: usize, k: usize, epsilon: f64, delta: f64) -> Result<Self> {
        let p = Self { n, k, epsilon, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k >= self.n {
            return Err(Error::InvalidParameter(format!("need 1 <= k < n, got n = {}, k = {}", self.n, self.k)));
        }
        if !(self.epsilon > 0.0 && self.delta > 0.0) || !self.epsilon.is_finite() || !self.delta.is_finite() {
            return Err(Error::InvalidParameter("epsilon and delta must be positive".into()));
        }
        // Sigma_delta meets {x = y = 0} where g is still linear
        if self.sigma_z_level() > self.delta {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {} too large: {{x = y = 0}} leaves the linear region of g before reaching psi = -1",
                self.epsilon
            )));
        }
        Ok(())
    }

    pub fn cutoff(&self) -> CutoffG {
        CutoffG::new(self.epsilon)
    }

    /// `c_0 = 1 + (1+eps)/(delta (1+2eps))`, the `z`-coefficient of `psi_delta` on `{x = y = 0, z <= delta}`.
    pub fn z_coefficient(&self) -> f64 {
        1.0 + (1.0 + self.epsilon) / (self.delta * (1.0 + 2.0 * self.epsilon))
    }

    /// The value of `z` where `{x = y = 0}` meets `psi_delta = -1`.
    pub fn sigma_z_level(&self) -> f64 {
        self.epsilon / self.z_coefficient()
    }

    fn check_point(&self, p: &HandlePoint) -> Result<()> {
        if p.coords.len() != 2 * self.n {
            return Err(Error::Dimension(format!("point has {} coordinates, expected {}", p.coords.len(), 2 * self.n)));
        }
        Ok(())
    }
}

/// A point of `R^2n` in handle coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandlePoint {
    pub coords: Vec<f64>,
}

impl HandlePoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    /// Pairs `(x_i, y_i)` for `i = 1..n`.
    pub fn planes(&self, k: usize) -> Vec<(f64, f64)> {
        let n = self.coords.len() / 2;
        (0..n)
            .map(|i| {
                let (a, b) = plane_index(k, i);
                (self.coords[a], self.coords[b])
            })
            .collect()
    }

    fn from_planes(planes: &[(f64, f64)], k: usize) -> Self {
        let n = planes.len();
        let mut coords = vec![0.0; 2 * n];
        for (i, &(x, y)) in planes.iter().enumerate() {
            let (a, b) = plane_index(k, i);
            coords[a] = x;
            coords[b] = y;
        }
        Self { coords }
    }

    /// Coordinates in standard `(x_1..x_n, y_1..y_n)` order.
    pub fn to_standard(&self, k: usize) -> Vec<f64> {
        let planes = self.planes(k);
        planes.iter().map(|p| p.0).chain(planes.iter().map(|p| p.1)).collect()
    }
}

/// Positions of `x_i` and `y_i` in the handle coordinate vector.
fn plane_index(k: usize, i: usize) -> (usize, usize) {
    if i < k {
        (i, k + i)
    } else {
        let j = 2 * k + 2 * (i - k);
        (j, j + 1)
    }
}

/// Values of the model functions at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potentials {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub phi: f64,
    pub psi_delta: f64,
    pub lyapunov: f64,
}

/// `(x, y, z)` at a point.
pub fn xyz(p: &HandlePoint, k: usize) -> (f64, f64, f64) {
    let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
    for (i, (a, b)) in p.planes(k).into_iter().enumerate() {
        if i < k {
            x += 0.75 * a * a;
            y += 0.25 * b * b;
        } else {
            z += 0.25 * (a * a + b * b);
        }
    }
    (x, y, z)
}

/// `psi_delta` as a function of `(x, y, z)`.
pub fn psi_delta_of(x: f64, y: f64, z: f64, params: &HandleParams) -> f64 {
    let e = params.epsilon;
    x - y + z - (1.0 + e) + (1.0 + e) * params.cutoff().value(y + (x + z) / params.delta)
}

pub fn potentials(p: &HandlePoint, params: &HandleParams) -> Result<Potentials> {
    params.check_point(p)?;
    let k = params.k;
    let (x, y, z) = xyz(p, k);
    let lyapunov = p.planes(k).iter().take(k).map(|(a, b)| a * b).sum();
    Ok(Potentials { x, y, z, phi: x - y + z, psi_delta: psi_delta_of(x, y, z, params), lyapunov })
}

fn field_from_planes(p: &HandlePoint, k: usize, f: impl Fn(usize, f64, f64) -> (f64, f64)) -> Vec<f64> {
    let planes: Vec<(f64, f64)> = p.planes(k).into_iter().enumerate().map(|(i, (a, b))| f(i, a, b)).collect();
    HandlePoint::from_planes(&planes, k).coords
}

/// `X = 1/2 sum_{i<=k} (3 x_i d/dx_i - y_i d/dy_i) + 1/2 sum_{i>k} (x_i d/dx_i + y_i d/dy_i)`.
pub fn liouville_field(p: &HandlePoint, params: &HandleParams) -> Result<Vec<f64>> {
    params.check_point(p)?;
    let k = params.k;
    Ok(field_from_planes(p, k, |i, a, b| if i < k { (1.5 * a, -0.5 * b) } else { (0.5 * a, 0.5 * b) }))
}

/// Coefficients of `lambda = i_X omega` against `(dx_i, dy_i)` in handle coordinate order.
pub fn liouville_form(p: &HandlePoint, params: &HandleParams) -> Result<Vec<f64>> {
    params.check_point(p)?;
    let k = params.k;
    // lambda = 1/2 (3 x dy + y dx) for i <= k, 1/2 (x dy - y dx) for i > k
    Ok(field_from_planes(p, k, |i, a, b| if i < k { (0.5 * b, 1.5 * a) } else { (-0.5 * b, 0.5 * a) }))
}

/// `omega(u, v) = sum dx_i ^ dy_i (u, v)` in handle coordinates.
pub fn omega(u: &[f64], v: &[f64], k: usize) -> f64 {
    let n = u.len() / 2;
    (0..n)
        .map(|i| {
            let (a, b) = plane_index(k, i);
            u[a] * v[b] - u[b] * v[a]
        })
        .sum()
}

/// The Hamiltonian fields of `x`, `y` and `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianFields {
    pub xx: Vec<f64>,
    pub xy: Vec<f64>,
    pub xz: Vec<f64>,
}

pub fn hamiltonian_fields(p: &HandlePoint, params: &HandleParams) -> Result<HamiltonianFields> {
    params.check_point(p)?;
    let k = params.k;
    Ok(HamiltonianFields {
        xx: field_from_planes(p, k, |i, a, _| if i < k { (0.0, 1.5 * a) } else { (0.0, 0.0) }),
        xy: field_from_planes(p, k, |i, _, b| if i < k { (-0.5 * b, 0.0) } else { (0.0, 0.0) }),
        xz: field_from_planes(p, k, |i, a, b| if i < k { (0.0, 0.0) } else { (-0.5 * b, 0.5 * a) }),
    })
}

/// Positive coefficients of `X_H = C_x X_x - C_y X_y + C_z X_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldCoefficients {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

/// `dL(X_H)` for `L = sum_{i<=k} x_i y_i`; equals `2 (C_x x + C_y y)`.
pub fn lyapunov_derivative(p: &HandlePoint, c: &FieldCoefficients, params: &HandleParams) -> Result<f64> {
    if !(c.cx > 0.0 && c.cy > 0.0 && c.cz > 0.0) {
        return Err(Error::InvalidParameter("field coefficients must be positive".into()));
    }
    params.check_point(p)?;
    let (x, y, _) = xyz(p, params.k);
    Ok(2.0 * (c.cx * x + c.cy * y))
}

/// `phi_t` of the Liouville field: `x_i e^{3t/2}, y_i e^{-t/2}` for `i <= k`, `e^{t/2}` on the rest.
pub fn liouville_flow(p: &HandlePoint, t: f64, params: &HandleParams) -> Result<HandlePoint> {
    params.check_point(p)?;
    let k = params.k;
    let (fx, fy, fz) = ((1.5 * t).exp(), (-0.5 * t).exp(), (0.5 * t).exp());
    let planes: Vec<(f64, f64)> = p
        .planes(k)
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| if i < k { (fx * a, fy * b) } else { (fz * a, fz * b) })
        .collect();
    Ok(HandlePoint::from_planes(&planes, k))
}

/// `z -> e^{i (k + 1/2) pi t} z` componentwise.
pub fn quadratic_model_flow(z0: &[Complex64], k: u32, t: f64) -> Vec<Complex64> {
    let w = Complex64::from_polar(1.0, (k as f64 + 0.5) * std::f64::consts::PI * t);
    z0.iter().map(|z| z * w).collect()
}

/// `t -> e^{i (k + 1/2) pi t} R^n` on `[0, 1]`, the linearized flow of the quadratic model on `R^n`.
pub fn quadratic_model_path(n: usize, k: u32) -> Result<GeneratorPath> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    GeneratorPath::hamiltonian(
        LagrangianFrame::horizontal(n),
        Mat::identity(2 * n, 2 * n),
        Schedule::linear((k as f64 + 0.5) * std::f64::consts::PI),
        (0.0, 1.0),
    )
}

/// Slope in `r = z / z_Sigma` of `psi_delta` along `{x = y = 0}` at `Sigma_delta`.
pub fn radial_slope(params: &HandleParams) -> f64 {
    let zs = params.sigma_z_level();
    let at = |r: f64| psi_delta_of(0.0, 0.0, r * zs, params);
    (at(1.0) - at(0.5)) / 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> HandleParams {
        HandleParams::new(2, 1, 0.1, 0.05).unwrap()
    }

    #[test]
    fn potentials_at_model_points() {
        let p = params();
        let o = potentials(&HandlePoint::new(vec![0.0; 4]), &p).unwrap();
        assert_eq!((o.x, o.y, o.z, o.phi), (0.0, 0.0, 0.0, 0.0));
        assert!((o.psi_delta + 1.1).abs() < 1e-15);
        let s = potentials(&HandlePoint::new(vec![0.0, 2.0, 0.0, 0.0]), &p).unwrap();
        assert_eq!(s.y, 1.0);
        assert_eq!(s.phi, -1.0);
    }

    #[test]
    fn field_examples() {
        let p = params();
        assert_eq!(liouville_field(&HandlePoint::new(vec![1.0, 0.0, 0.0, 0.0]), &p).unwrap(), vec![1.5, 0.0, 0.0, 0.0]);
        assert_eq!(liouville_field(&HandlePoint::new(vec![0.0; 4]), &p).unwrap(), vec![0.0; 4]);
        let f = hamiltonian_fields(&HandlePoint::new(vec![0.0, 0.0, 1.0, 0.0]), &p).unwrap();
        assert_eq!(f.xz, vec![0.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn hamiltonian_fields_solve_omega_equation() {
        // omega(X_H, v) = -dH(v), with dH from central differences (exact for quadratics)
        let p = HandleParams::new(3, 1, 0.1, 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let q = HandlePoint::new((0..6).map(|_| rng.random_range(-2.0..2.0)).collect());
            let v: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = hamiltonian_fields(&q, &p).unwrap();
            let shift = |s: f64| HandlePoint::new(q.coords.iter().zip(&v).map(|(a, b)| a + s * b).collect());
            let (xp, yp, zp) = xyz(&shift(1.0), 1);
            let (xm, ym, zm) = xyz(&shift(-1.0), 1);
            let d = [(xp - xm) / 2.0, (yp - ym) / 2.0, (zp - zm) / 2.0];
            for (field, dh) in [(&f.xx, d[0]), (&f.xy, d[1]), (&f.xz, d[2])] {
                assert!((omega(field, &v, 1) + dh).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flow_example_and_group_law() {
        let p = params();
        let q = HandlePoint::new(vec![1.0, 1.0, 1.0, 1.0]);
        let f = liouville_flow(&q, 2.0 * 2f64.ln(), &p).unwrap();
        let want = [8.0, 0.5, 2.0, 2.0];
        for (a, b) in f.coords.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        let a = liouville_flow(&liouville_flow(&q, 0.3, &p).unwrap(), 0.4, &p).unwrap();
        let b = liouville_flow(&q, 0.7, &p).unwrap();
        for (u, v) in a.coords.iter().zip(&b.coords) {
            assert!((u - v).abs() <= 1e-15 * u.abs().max(1.0));
        }
    }

    #[test]
    fn lyapunov_value() {
        let p = params();
        let c = FieldCoefficients { cx: 1.0, cy: 1.0, cz: 1.0 };
        let d = lyapunov_derivative(&HandlePoint::new(vec![1.0, 0.0, 0.0, 0.0]), &c, &p).unwrap();
        assert_eq!(d, 1.5);
        assert_eq!(lyapunov_derivative(&HandlePoint::new(vec![0.0, 0.0, 3.0, 1.0]), &c, &p).unwrap(), 0.0);
        let bad = FieldCoefficients { cx: 1.0, cy: 0.0, cz: 1.0 };
        assert!(lyapunov_derivative(&HandlePoint::new(vec![0.0; 4]), &bad, &p).is_err());
    }

    #[test]
    fn quadratic_flow() {
        let z = quadratic_model_flow(&[Complex64::new(1.0, 0.0)], 0, 1.0);
        assert!((z[0] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let z = quadratic_model_flow(&[Complex64::new(1.0, 0.0)], 1, 1.0);
        assert!((z[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn radial_slope_is_epsilon() {
        for (e, d) in [(0.1, 0.05), (0.05, 0.01), (0.3, 0.2)] {
            let p = HandleParams::new(3, 2, e, d).unwrap();
            assert!((radial_slope(&p) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn params_validation() {
        assert!(HandleParams::new(2, 2, 0.1, 0.1).is_err());
        assert!(HandleParams::new(2, 0, 0.1, 0.1).is_err());
        assert!(HandleParams::new(2, 1, -0.1, 0.1).is_err());
    }
}
