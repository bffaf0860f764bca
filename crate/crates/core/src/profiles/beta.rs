use serde::{Deserialize, Serialize};

use super::radial::smoothstep;
use crate::error::{Error, Result};

/// Inputs of the interpolating function near the boundary `r = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub eps: f64,
    pub delta: f64,
    pub rho: f64,
    pub reeb_norm: f64,
}

impl BetaParams {
    /// `K = delta / (rho |R|)`; the envelope asks for `(1 - r) beta'(r) <= K/2`.
    pub fn k(&self) -> f64 {
        self.delta / (self.rho * self.reeb_norm)
    }
}

/// One row of the sample table: `(r, u, beta, d beta / du)` with `u = -ln(1 - r)`.
pub type BetaSample = (f64, f64, f64, f64);

/// `beta` in the logarithmic coordinate `u = -ln(1 - r)`: zero up to `u0 = -ln eps`, then
/// `d beta/du = chi(u)/L` with `chi` a smoothstep bump of plateau `L - 1`, so `beta` reaches 1 at
/// `u_end = u0 + L + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationBeta {
    pub params: BetaParams,
    pub scale: f64,
    pub u0: f64,
    pub u_end: f64,
    pub r_end: f64,
    pub samples: Vec<BetaSample>,
}

fn ramp_integral(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s.powi(4) * (s * s - 3.0 * s + 2.5)
}

pub fn build_beta(params: BetaParams, sample_count: usize) -> Result<InterpolationBeta> {
    let BetaParams { eps, delta, rho, reeb_norm } = params;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(delta > 0.0 && rho > 0.0 && reeb_norm > 0.0) || !params.k().is_finite() {
        return Err(Error::InvalidParameter("delta, rho and the Reeb norm must be positive".into()));
    }
    let scale = (2.0 / params.k()).max(1.0);
    let u0 = -eps.ln();
    let u_end = u0 + scale + 1.0;
    let mut beta = InterpolationBeta { params, scale, u0, u_end, r_end: -(-u_end).exp_m1(), samples: vec![] };
    let m = sample_count.max(2);
    let (lo, hi) = (u0 - 0.5, u_end + 0.5);
    beta.samples = (0..m)
        .map(|i| {
            let u = lo + (hi - lo) * i as f64 / (m - 1) as f64;
            (-(-u).exp_m1(), u, beta.value_u(u), beta.derivative_u(u))
        })
        .collect();
    Ok(beta)
}

impl InterpolationBeta {
    fn chi(&self, u: f64) -> f64 {
        if u <= self.u0 || u >= self.u_end {
            0.0
        } else {
            smoothstep((u - self.u0).min(1.0)).min(smoothstep((self.u_end - u).min(1.0)))
        }
    }

    pub fn value_u(&self, u: f64) -> f64 {
        if u <= self.u0 {
            return 0.0;
        }
        if u >= self.u_end {
            return 1.0;
        }
        let s = u - self.u0;
        let area = if s <= 1.0 {
            ramp_integral(s)
        } else if u <= self.u_end - 1.0 {
            0.5 + (s - 1.0)
        } else {
            self.scale - ramp_integral(self.u_end - u)
        };
        (area / self.scale).min(1.0)
    }

    pub fn derivative_u(&self, u: f64) -> f64 {
        self.chi(u) / self.scale
    }

    /// `beta(r)`: 0 for `r <= 1 - eps`, 1 for `r >= r_end` and at `r = 1`.
    pub fn value(&self, r: f64) -> f64 {
        if r <= 1.0 - self.params.eps {
            return 0.0;
        }
        if r >= 1.0 {
            return 1.0;
        }
        self.value_u(-(-r).ln_1p())
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r <= 1.0 - self.params.eps || r >= 1.0 {
            return 0.0;
        }
        self.derivative_u(-(-r).ln_1p()) / (1.0 - r)
    }

    /// Checks the table against the envelope `(1 - r) beta' <= K/2` and the boundary values.
    pub fn check_envelope(&self) -> EnvelopeReport {
        let bound = 0.5 * self.params.k();
        let (mut worst, mut witness_u) = (f64::NEG_INFINITY, f64::NAN);
        let mut monotone = true;
        for w in self.samples.windows(2) {
            monotone &= w[1].2 >= w[0].2;
        }
        for &(_, u, _, d) in &self.samples {
            if d > worst {
                worst = d;
                witness_u = u;
            }
        }
        let zero_inside = self.samples.iter().filter(|s| s.1 <= self.u0).all(|s| s.2 == 0.0);
        let one_at_end = self.value_u(self.u_end) == 1.0 && self.value(1.0) == 1.0;
        EnvelopeReport {
            bound,
            max_scaled_derivative: worst,
            witness_u,
            zero_inside,
            one_at_end,
            monotone,
            float_visible_end: self.r_end < 1.0,
            pass: worst <= bound * (1.0 + 1e-12) && zero_inside && one_at_end && monotone,
        }
    }
}

/// `0 <= beta'(r) <= delta / (rho |R| (1 - r))` on a uniform grid over `[1 - eps, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEnvelopeReport {
    pub points: usize,
    /// Largest `beta'(r) (1 - r) / K` over interior grid points.
    pub max_ratio: f64,
    pub witness_r: f64,
    pub min_derivative: f64,
    pub beta_at_start: f64,
    pub beta_at_one: f64,
    pub pass: bool,
}

impl InterpolationBeta {
    pub fn check_envelope_grid(&self, points: usize) -> GridEnvelopeReport {
        let m = points.max(2);
        let k = self.params.k();
        let r0 = 1.0 - self.params.eps;
        let (mut max_ratio, mut witness_r, mut min_d) = (0.0f64, r0, f64::INFINITY);
        for i in 0..m {
            let r = r0 + self.params.eps * i as f64 / (m - 1) as f64;
            let d = self.derivative(r);
            min_d = min_d.min(d);
            if r < 1.0 {
                let ratio = d * (1.0 - r) / k;
                if ratio > max_ratio {
                    max_ratio = ratio;
                    witness_r = r;
                }
            }
        }
        let (b0, b1) = (self.value(r0), self.value(1.0));
        GridEnvelopeReport {
            points: m,
            max_ratio,
            witness_r,
            min_derivative: min_d,
            beta_at_start: b0,
            beta_at_one: b1,
            pass: max_ratio < 1.0 && min_d >= 0.0 && b0 == 0.0 && b1 == 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub bound: f64,
    pub max_scaled_derivative: f64,
    pub witness_u: f64,
    pub zero_inside: bool,
    pub one_at_end: bool,
    pub monotone: bool,
    /// `false` when `r_end` rounds to 1, so the rise cannot be resolved on a grid in `r`.
    pub float_visible_end: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyCheck {
    pub slope_gap: f64,
    pub min_beta_derivative: f64,
    pub pass: bool,
}

/// The homotopy from slope `a_minus` down to `a_plus` through `beta` is monotone when
/// `a_minus >= a_plus` and `beta' >= 0`.
pub fn monotone_homotopy_check(a_minus: f64, a_plus: f64, beta: &InterpolationBeta) -> HomotopyCheck {
    let min_d = beta.samples.iter().map(|s| s.3).fold(f64::INFINITY, f64::min);
    HomotopyCheck { slope_gap: a_minus - a_plus, min_beta_derivative: min_d, pass: a_minus >= a_plus && min_d >= 0.0 }
}
