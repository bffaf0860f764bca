use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{psi_delta_of, HandleParams};
use crate::error::{Error, Result};

/// Sampling of `Sigma_delta = {psi_delta = -1}` inside a box in `(x, y, z)`.
///
/// Each of the three coordinate planes carries a `resolution^2` lattice; from every lattice
/// point the remaining coordinate is solved onto `Sigma_delta` by bisection (`psi_delta` is
/// increasing in `x` and `z` and decreasing in `y`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
    pub x_max: f64,
    pub y_max: f64,
    pub z_max: f64,
    pub exclusion_radius: f64,
    pub band: f64,
}

impl GridSpec {
    /// The box `[0, 2(1+3eps)delta] x [0, 2(1+3eps)] x [0, 2(1+3eps)delta]`.
    pub fn default_for(params: &HandleParams, resolution: usize) -> Self {
        let s = 2.0 * (1.0 + 3.0 * params.epsilon);
        Self {
            resolution,
            x_max: s * params.delta,
            y_max: s,
            z_max: s * params.delta,
            exclusion_radius: 1e-6,
            band: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub psi_delta: f64,
    /// A point of `R^2n` with these `(x, y, z)` values.
    pub point: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityCertificate {
    pub params: HandleParams,
    pub grid: GridSpec,
    pub points_evaluated: usize,
    pub min_value: f64,
    pub witness: Witness,
    pub pass: bool,
}

/// `d psi_delta (X)` as a function of `(x, y, z)`.
pub fn transversality_value(x: f64, y: f64, z: f64, params: &HandleParams) -> f64 {
    let e = params.epsilon;
    let gp = params.cutoff().derivative(y + (x + z) / params.delta);
    let a = 1.0 + (1.0 + e) * gp / params.delta;
    let b = -1.0 + (1.0 + e) * gp;
    a * 3.0 * x - b * y + a * z
}

/// Root of a monotone `f` on `[lo, hi]` if it changes sign there.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let rising = fhi > flo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if (fm < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Clone, Copy)]
struct Sample {
    value: f64,
    x: f64,
    y: f64,
    z: f64,
}

fn lex(a: &Sample, b: &Sample) -> Ordering {
    a.value.total_cmp(&b.value).then(a.x.total_cmp(&b.x)).then(a.y.total_cmp(&b.y)).then(a.z.total_cmp(&b.z))
}

pub fn transversality_certificate(params: &HandleParams, grid: &GridSpec) -> Result<TransversalityCertificate> {
    params.validate()?;
    let m = grid.resolution;
    if m < 2 {
        return Err(Error::InvalidParameter("grid resolution must be at least 2".into()));
    }
    let lin = |max: f64, i: usize| max * i as f64 / (m - 1) as f64;
    let psi = |x: f64, y: f64, z: f64| psi_delta_of(x, y, z, params) + 1.0;

    let samples: Vec<Sample> = (0..3 * m)
        .into_par_iter()
        .flat_map_iter(|row| {
            let (plane, i) = (row / m, row % m);
            (0..m).filter_map(move |j| {
                let (x, y, z) = match plane {
                    0 => {
                        let (x, z) = (lin(grid.x_max, i), lin(grid.z_max, j));
                        (x, bisect(|y| psi(x, y, z), 0.0, grid.y_max)?, z)
                    }
                    1 => {
                        let (y, z) = (lin(grid.y_max, i), lin(grid.z_max, j));
                        (bisect(|x| psi(x, y, z), 0.0, grid.x_max)?, y, z)
                    }
                    _ => {
                        let (x, y) = (lin(grid.x_max, i), lin(grid.y_max, j));
                        (x, y, bisect(|z| psi(x, y, z), 0.0, grid.z_max)?)
                    }
                };
                if psi(x, y, z).abs() > grid.band || (x * x + y * y + z * z).sqrt() < grid.exclusion_radius {
                    return None;
                }
                Some(Sample { value: transversality_value(x, y, z, params), x, y, z })
            })
        })
        .collect();

    let best = samples
        .iter()
        .copied()
        .min_by(lex)
        .ok_or_else(|| Error::Infeasible("no grid point lies on psi_delta = -1 inside the box".into()))?;
    Ok(TransversalityCertificate {
        params: *params,
        grid: *grid,
        points_evaluated: samples.len(),
        min_value: best.value,
        witness: Witness {
            x: best.x,
            y: best.y,
            z: best.z,
            psi_delta: psi_delta_of(best.x, best.y, best.z, params),
            point: [(4.0 * best.x / 3.0).sqrt(), (4.0 * best.y).sqrt(), (4.0 * best.z).sqrt()],
        },
        pass: best.value > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{liouville_field, potentials, xyz, HandlePoint};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn value_matches_directional_derivative() {
        let p = HandleParams::new(3, 1, 0.1, 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let q = HandlePoint::new((0..6).map(|_| rng.random_range(-0.4..0.4)).collect());
            let x = liouville_field(&q, &p).unwrap();
            let h = 1e-6;
            let shift = |s: f64| HandlePoint::new(q.coords.iter().zip(&x).map(|(a, b)| a + s * b).collect());
            let d = (potentials(&shift(h), &p).unwrap().psi_delta - potentials(&shift(-h), &p).unwrap().psi_delta)
                / (2.0 * h);
            let (a, b, c) = xyz(&q, 1);
            assert!((d - transversality_value(a, b, c, &p)).abs() < 1e-6);
        }
    }

    #[test]
    fn y_axis_value() {
        let p = HandleParams::new(2, 1, 0.1, 0.05).unwrap();
        for i in 0..=60 {
            let y = 0.05 * i as f64;
            let gp = p.cutoff().derivative(y);
            assert!((transversality_value(0.0, y, 0.0, &p) - (1.0 - 1.1 * gp) * y).abs() < 1e-14);
            // psi_delta is decreasing in y from psi(0) = -1 - eps, so {x = z = 0} misses the level set
            assert!(psi_delta_of(0.0, y, 0.0, &p) < -1.0);
        }
        assert!(bisect(|y| psi_delta_of(0.0, y, 0.0, &p) + 1.0, 0.0, 3.0).is_none());
    }

    #[test]
    fn certificate_passes_small_grid() {
        let p = HandleParams::new(2, 1, 0.1, 0.05).unwrap();
        let c = transversality_certificate(&p, &GridSpec::default_for(&p, 12)).unwrap();
        assert!(c.pass, "{c:?}");
        assert!(c.points_evaluated > 0);
        assert!((c.witness.psi_delta + 1.0).abs() < 1e-9);
    }

    #[test]
    fn certificate_deterministic() {
        let p = HandleParams::new(2, 1, 0.05, 0.01).unwrap();
        let g = GridSpec::default_for(&p, 20);
        assert_eq!(transversality_certificate(&p, &g).unwrap(), transversality_certificate(&p, &g).unwrap());
    }

    #[test]
    fn empty_box_is_an_error() {
        let p = HandleParams::new(2, 1, 0.1, 0.05).unwrap();
        let g = GridSpec { resolution: 5, x_max: 1e-3, y_max: 1e-3, z_max: 1e-5, exclusion_radius: 1e-6, band: 1e-6 };
        assert!(matches!(transversality_certificate(&p, &g), Err(Error::Infeasible(_))));
    }
}
