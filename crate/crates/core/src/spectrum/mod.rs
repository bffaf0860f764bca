//! Chords of the handle Hamiltonian on `{x = y = 0}`, their Robbin-Salamon indices
//! (closed form and by integrating the linearized flow), and the index intervals of
//! the two clusters a perturbation splits each family into.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::handle::HandleParams;
use crate::maslov::{rs_index, HalfInt};
use crate::symplin::{ConstantPath, FnPath, LagrangianFrame, Mat};

/// Tolerance on `a C_z / 2 in pi Z`.
pub const CHORD_LEVEL_TOL: f64 = 1e-9;
const ODE_STEP: f64 = 1e-4;
const ODE_PHASE_STEP: f64 = 2e-3;

/// `C_x, C_y` constant along chords, `C_z` a monotone function of `z` given by a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientProfile {
    pub cx: f64,
    pub cy: f64,
    /// `(z, C_z(z))`, increasing in `z`, linearly interpolated.
    pub cz_table: Vec<(f64, f64)>,
}

impl CoefficientProfile {
    pub fn new(cx: f64, cy: f64, cz_table: Vec<(f64, f64)>) -> Result<Self> {
        let p = Self { cx, cy, cz_table };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cx > 0.0 && self.cy > 0.0) {
            return Err(Error::InvalidParameter("C_x and C_y must be positive".into()));
        }
        let t = &self.cz_table;
        if t.is_empty() {
            return Err(Error::InvalidParameter("empty C_z table".into()));
        }
        if t.iter().any(|&(z, c)| !(z.is_finite() && c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidParameter("C_z table entries must be finite with C_z > 0".into()));
        }
        if t.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParameter("C_z table abscissae must be strictly increasing".into()));
        }
        let up = t.windows(2).all(|w| w[1].1 >= w[0].1);
        let down = t.windows(2).all(|w| w[1].1 <= w[0].1);
        if !(up || down) {
            return Err(Error::InvalidParameter("C_z table is not monotone".into()));
        }
        Ok(())
    }

    /// The handle model: `C_z` rises from `c_0` at `z = 0` to `c_0 / eps` at `z = z_Sigma`
    /// along a smoothstep in `z / z_Sigma`.
    pub fn handle_model(params: &HandleParams, cx: f64, cy: f64, samples: usize) -> Result<Self> {
        params.validate()?;
        let c0 = params.z_coefficient();
        let zs = params.sigma_z_level();
        let m = samples.max(2);
        let table = (0..m)
            .map(|i| {
                let r = i as f64 / (m - 1) as f64;
                let s = r * r * r * (10.0 + r * (-15.0 + 6.0 * r));
                (r * zs, c0 + (c0 / params.epsilon - c0) * s)
            })
            .collect();
        Self::new(cx, cy, table)
    }

    /// `C_z(z)`; constant beyond the ends of the table.
    pub fn cz(&self, z: f64) -> f64 {
        let t = &self.cz_table;
        if z <= t[0].0 {
            return t[0].1;
        }
        if z >= t[t.len() - 1].0 {
            return t[t.len() - 1].1;
        }
        let i = t.partition_point(|p| p.0 <= z) - 1;
        let (z0, c0) = t[i];
        let (z1, c1) = t[i + 1];
        c0 + (c1 - c0) * (z - z0) / (z1 - z0)
    }

    pub fn z_range(&self) -> (f64, f64) {
        (self.cz_table[0].0, self.cz_table[self.cz_table.len() - 1].0)
    }
}

/// A chord family on `{x = y = 0}` at level `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandleChord {
    pub z_level: f64,
    /// `m` with `a C_z(z) / 2 = m pi`; `None` for the constant chord unless it sits on such a level.
    pub m: Option<i64>,
    pub is_constant: bool,
}

/// The integer `m` with `a C_z / 2 = m pi`, or an error if there is none.
pub fn chord_multiple(a: f64, cz: f64) -> Result<i64> {
    let value = a * cz / 2.0;
    let m = (value / PI).round();
    if !value.is_finite() || (value - m * PI).abs() > CHORD_LEVEL_TOL * value.abs().max(1.0) {
        return Err(Error::NotAChordLevel { value });
    }
    Ok(m as i64)
}

/// The constant chord at `z = 0` and one level per integer `m` with `a C_z(z)/2 = m pi`, `z in (0, z_max]`.
pub fn chord_levels(a: f64, prof: &CoefficientProfile, z_max: f64) -> Result<Vec<HandleChord>> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter("slope a must be positive".into()));
    }
    prof.validate()?;
    let (z_lo, z_hi) = prof.z_range();
    let z_top = z_max.min(z_hi);
    let f = |z: f64| a * prof.cz(z) / (2.0 * PI);
    let mut out = vec![HandleChord { z_level: 0.0, m: chord_multiple(a, prof.cz(0.0)).ok(), is_constant: true }];
    let z_start = z_lo.max(0.0);
    if z_top <= z_start {
        return Ok(out);
    }
    let (f0, f1) = (f(z_start), f(z_top));
    let increasing = f1 >= f0;
    let (lo, hi) = if increasing { (f0, f1) } else { (f1, f0) };
    // levels strictly beyond the value at the constant chord
    let ms: Vec<i64> = if increasing {
        ((lo.floor() as i64 + 1)..=(hi + 1e-12).floor() as i64).collect()
    } else {
        ((lo - 1e-12).ceil() as i64..hi.ceil() as i64).rev().collect()
    };
    for m in ms {
        if m <= 0 {
            continue;
        }
        let target = m as f64;
        let (mut l, mut r) = (z_start, z_top);
        while r - l > 1e-12 {
            let mid = 0.5 * (l + r);
            if (f(mid) < target) == increasing {
                l = mid;
            } else {
                r = mid;
            }
        }
        let z = 0.5 * (l + r);
        out.push(HandleChord { z_level: z, m: Some(m), is_constant: false });
    }
    Ok(out)
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 0 <= k <= n, n >= 1; got n = {n}, k = {k}")));
    }
    Ok(())
}

/// `mu_RS = n/2 + (n - k)(a C_z / 2 pi - 1/2)`, the closed form as displayed for the handle chords.
pub fn handle_rs_index(n: usize, k: usize, a: f64, cz_at_level: f64) -> Result<HalfInt> {
    check_nk(n, k)?;
    let m = chord_multiple(a, cz_at_level)?;
    let (n, k) = (n as i64, k as i64);
    Ok(HalfInt::from_halves(n + (n - k) * (2 * m - 1)))
}

/// `(n - k) a C_z / 2 pi - k/2`: the index obtained from crossing forms with the
/// hyperbolic blocks contributing `-1/2` each.
pub fn handle_rs_index_corrected(n: usize, k: usize, a: f64, cz_at_level: f64) -> Result<HalfInt> {
    check_nk(n, k)?;
    let m = chord_multiple(a, cz_at_level)?;
    let (n, k) = (n as i64, k as i64);
    Ok(HalfInt::from_halves(2 * (n - k) * m - k))
}

/// RK4 solution of `v' = A v` on `[0, 1]`, `v(0) = (0, 1)`, stored at every step.
#[derive(Debug, Clone)]
struct PlanarFlow {
    a: [[f64; 2]; 2],
    h: f64,
    states: Vec<[f64; 2]>,
}

impl PlanarFlow {
    fn rhs(a: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
        [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
    }

    fn step(a: &[[f64; 2]; 2], v: [f64; 2], h: f64) -> [f64; 2] {
        let add = |v: [f64; 2], k: [f64; 2], s: f64| [v[0] + s * k[0], v[1] + s * k[1]];
        let k1 = Self::rhs(a, v);
        let k2 = Self::rhs(a, add(v, k1, h / 2.0));
        let k3 = Self::rhs(a, add(v, k2, h / 2.0));
        let k4 = Self::rhs(a, add(v, k3, h));
        [
            v[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            v[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    }

    fn integrate(a: [[f64; 2]; 2], h: f64) -> Result<Self> {
        let steps = (1.0 / h).round() as usize;
        if steps == 0 {
            return Err(Error::Integration("step larger than the interval".into()));
        }
        let h = 1.0 / steps as f64;
        let mut states = Vec::with_capacity(steps + 1);
        let mut v = [0.0, 1.0];
        states.push(v);
        for _ in 0..steps {
            v = Self::step(&a, v, h);
            if !(v[0].is_finite() && v[1].is_finite()) {
                return Err(Error::Integration("solution blew up".into()));
            }
            states.push(v);
        }
        Ok(Self { a, h, states })
    }

    fn at(&self, t: f64) -> [f64; 2] {
        let t = t.clamp(0.0, 1.0);
        let j = ((t / self.h).floor() as usize).min(self.states.len() - 1);
        let dt = t - j as f64 * self.h;
        if dt <= 0.0 {
            self.states[j]
        } else {
            Self::step(&self.a, self.states[j], dt)
        }
    }

    fn end(&self) -> [f64; 2] {
        *self.states.last().unwrap()
    }
}

/// Integrates `v' = A v` with steps `h` and `h/2` and checks that they agree.
/// The step is capped so that `h` times the rate of `A` stays at most `ODE_PHASE_STEP`.
fn checked_flow(a: [[f64; 2]; 2]) -> Result<PlanarFlow> {
    let rate = (a[0][1] * a[1][0]).abs().sqrt() + a[0][0].abs().max(a[1][1].abs());
    let h = if rate > 0.0 { ODE_STEP.min(ODE_PHASE_STEP / rate) } else { ODE_STEP };
    let coarse = PlanarFlow::integrate(a, h)?;
    let fine = PlanarFlow::integrate(a, h / 2.0)?;
    let (u, v) = (coarse.end(), fine.end());
    let scale = v[0].abs().max(v[1].abs()).max(1.0);
    let err = (u[0] - v[0]).abs().max((u[1] - v[1]).abs());
    if err > 1e-9 * scale {
        return Err(Error::Integration(format!("step doubling changed the endpoint by {err:e}")));
    }
    Ok(fine)
}

/// The linearized flow of the handle Hamiltonian along a chord at level `z`, applied to `i R^n`.
pub fn handle_linearized_path(n: usize, k: usize, a: f64, prof: &CoefficientProfile, z_level: f64) -> Result<FnPath> {
    check_nk(n, k)?;
    prof.validate()?;
    let cz = prof.cz(z_level);
    let hyperbolic = if k > 0 {
        let flow = checked_flow([[0.0, a * prof.cy / 2.0], [a * 3.0 * prof.cx / 2.0, 0.0]])?;
        // Phi^22(t) > 1 for t > 0: the block never returns to the vertical
        if flow.states.iter().skip(1).any(|s| !(s[1] > 1.0)) {
            return Err(Error::Integration("hyperbolic block left the region Phi^22 > 1".into()));
        }
        Some(flow)
    } else {
        None
    };
    let w = a * cz / 2.0;
    let rotation = if k < n { Some(checked_flow([[0.0, -w], [w, 0.0]])?) } else { None };
    let resolution = 512usize.max(64 * (w / PI).ceil() as usize);
    let path = FnPath::new(n, (0.0, 1.0), move |t| {
        let mut m = Mat::zeros(2 * n, n);
        for i in 0..n {
            let v = if i < k { hyperbolic.as_ref().unwrap().at(t) } else { rotation.as_ref().unwrap().at(t) };
            // each column spans its own block, so rescaling it keeps the subspace and the conditioning
            let norm = v[0].hypot(v[1]);
            m[(i, i)] = v[0] / norm;
            m[(n + i, i)] = v[1] / norm;
        }
        m
    })?;
    Ok(path.with_resolution(resolution))
}

/// `mu_RS(Phi(t) i R^n, i R^n)` from the crossing forms of the integrated linearized flow.
pub fn handle_rs_index_ode(n: usize, k: usize, a: f64, prof: &CoefficientProfile, z_level: f64) -> Result<HalfInt> {
    chord_multiple(a, prof.cz(z_level))?;
    let path = handle_linearized_path(n, k, a, prof, z_level)?;
    rs_index(&path, &ConstantPath::unit(LagrangianFrame::vertical(n)))
}

/// An open interval with half-integer endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenInterval {
    pub lo: HalfInt,
    pub hi: HalfInt,
}

impl OpenInterval {
    pub fn contains(&self, x: HalfInt) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn width(&self) -> HalfInt {
        self.hi - self.lo
    }
}

/// Maslov index ranges of the two clusters of nondegenerate chords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterBounds {
    pub first: OpenInterval,
    pub second: OpenInterval,
}

/// `((n-k)m - n + k/2, (n-k)m + k/2)` and `((n-k)m - k/2 - 1, (n-k)m + n - k/2 - 1)` with `m = a C_z / 2 pi`.
pub fn perturbation_cluster_bounds(n: usize, k: usize, a: f64, cz_at_level: f64) -> Result<ClusterBounds> {
    check_nk(n, k)?;
    let m = chord_multiple(a, cz_at_level)?;
    let (n, k) = (n as i64, k as i64);
    let c = 2 * (n - k) * m;
    Ok(ClusterBounds {
        first: OpenInterval { lo: HalfInt::from_halves(c - 2 * n + k), hi: HalfInt::from_halves(c + k) },
        second: OpenInterval { lo: HalfInt::from_halves(c - k - 2), hi: HalfInt::from_halves(c + 2 * n - k - 2) },
    })
}

/// One `(n, k, m)` case of the index sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub m: i64,
    pub a_cz: f64,
    pub mu_rs_formula: HalfInt,
    pub mu_rs_ode: HalfInt,
    pub mu_rs_corrected: HalfInt,
    pub clusters: ClusterBounds,
}

impl SweepRow {
    pub fn agrees(&self) -> bool {
        self.mu_rs_formula == self.mu_rs_ode
    }
}

/// All `1 <= k < n <= n_max`, `1 <= m <= m_max` on the handle model profile at `z = z_Sigma / 2`,
/// with `a = 2 pi m / C_z(z)`.
pub fn index_sweep(params: &HandleParams, n_max: usize, m_max: i64) -> Result<Vec<SweepRow>> {
    let prof = CoefficientProfile::handle_model(params, 1.0, 1.0, 65)?;
    let z = params.sigma_z_level() / 2.0;
    let cz = prof.cz(z);
    let cases: Vec<(usize, usize, i64)> =
        (2..=n_max).flat_map(|n| (1..n).flat_map(move |k| (1..=m_max).map(move |m| (n, k, m)))).collect();
    cases
        .into_par_iter()
        .map(|(n, k, m)| {
            let a = 2.0 * PI * m as f64 / cz;
            Ok(SweepRow {
                n,
                k,
                m,
                a_cz: a * cz,
                mu_rs_formula: handle_rs_index(n, k, a, cz)?,
                mu_rs_ode: handle_rs_index_ode(n, k, a, &prof, z)?,
                mu_rs_corrected: handle_rs_index_corrected(n, k, a, cz)?,
                clusters: perturbation_cluster_bounds(n, k, a, cz)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_table() -> CoefficientProfile {
        CoefficientProfile::new(1.0, 1.0, vec![(0.0, 2.0), (1.0, 10.0)]).unwrap()
    }

    #[test]
    fn levels_of_linear_table() {
        let levels = chord_levels(PI, &linear_table(), 1.0).unwrap();
        assert!(levels[0].is_constant);
        assert_eq!(levels[0].m, Some(1));
        let zs: Vec<f64> = levels[1..].iter().map(|c| c.z_level).collect();
        let ms: Vec<i64> = levels[1..].iter().map(|c| c.m.unwrap()).collect();
        assert_eq!(ms, vec![2, 3, 4, 5]);
        for (z, want) in zs.iter().zip([0.25, 0.5, 0.75, 1.0]) {
            assert!((z - want).abs() < 1e-10);
        }
    }

    #[test]
    fn small_slope_only_constant() {
        let levels = chord_levels(0.5, &linear_table(), 1.0).unwrap();
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].m, None);
    }

    #[test]
    fn level_count_monotone_in_slope() {
        let t = linear_table();
        let mut last = 0;
        for i in 1..40 {
            let c = chord_levels(0.25 * i as f64, &t, 1.0).unwrap().len();
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn non_monotone_table_rejected() {
        assert!(CoefficientProfile::new(1.0, 1.0, vec![(0.0, 2.0), (0.5, 5.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn formula_examples() {
        assert_eq!(handle_rs_index(3, 1, 1.0, 2.0 * PI).unwrap(), HalfInt::from_halves(5));
        assert_eq!(handle_rs_index(2, 1, 1.0, 4.0 * PI).unwrap(), HalfInt::from_halves(5));
        for n in 2..6 {
            assert_eq!(handle_rs_index(n, n - 1, 2.0, PI).unwrap(), HalfInt::from_halves(n as i64 + 1));
        }
        assert!(matches!(handle_rs_index(3, 1, 1.0, 7.0), Err(Error::NotAChordLevel { .. })));
    }

    #[test]
    fn cluster_examples() {
        let c = perturbation_cluster_bounds(3, 1, 1.0, 2.0 * PI).unwrap();
        assert_eq!((c.first.lo.halves, c.first.hi.halves), (-1, 5));
        assert_eq!((c.second.lo.halves, c.second.hi.halves), (1, 7));
        assert_eq!(c.first.width(), HalfInt::from_int(3));
        assert_eq!(c.second.width(), HalfInt::from_int(3));
    }

    #[test]
    fn rotation_block_alone_gives_m() {
        let prof = CoefficientProfile::new(1.0, 1.0, vec![(0.0, 2.0 * PI), (1.0, 2.0 * PI)]).unwrap();
        assert_eq!(handle_rs_index_ode(1, 0, 1.0, &prof, 0.5).unwrap(), HalfInt::from_int(1));
        assert_eq!(handle_rs_index_ode(1, 0, 3.0, &prof, 0.5).unwrap(), HalfInt::from_int(3));
    }

    #[test]
    fn hyperbolic_blocks_tilt_backwards() {
        let prof = CoefficientProfile::new(1.0, 1.0, vec![(0.0, 2.0 * PI), (1.0, 2.0 * PI)]).unwrap();
        for n in 1..4 {
            assert_eq!(handle_rs_index_ode(n, n, 1.0, &prof, 0.5).unwrap(), HalfInt::from_halves(-(n as i64)));
        }
    }

    #[test]
    fn ode_matches_crossing_form_count() {
        let prof = CoefficientProfile::new(1.0, 2.0, vec![(0.0, 2.0 * PI), (1.0, 2.0 * PI)]).unwrap();
        for (n, k, a) in [(2, 1, 1.0), (3, 1, 1.0), (3, 2, 2.0)] {
            let ode = handle_rs_index_ode(n, k, a, &prof, 0.5).unwrap();
            assert_eq!(ode, handle_rs_index_corrected(n, k, a, 2.0 * PI).unwrap());
            assert_eq!(ode - handle_rs_index(n, k, a, 2.0 * PI).unwrap(), HalfInt::from_int(-(k as i64)));
        }
    }
}
