use serde::{Deserialize, Serialize};

/// The cutoff `g`: `g(t) = t/(1+2eps)` for `t <= 1+eps`, `g = 1` for `t >= 1+3eps`,
/// joined by a quintic smoothstep in `g'`, so `0 <= g' <= 1/(1+2eps)` everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffG {
    pub epsilon: f64,
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

/// `int_0^u smoothstep`.
fn smoothstep_integral(u: f64) -> f64 {
    u * u * u * u * (2.5 + u * (-3.0 + u))
}

impl CutoffG {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon }
    }

    fn knots(&self) -> (f64, f64) {
        (1.0 + self.epsilon, 1.0 + 3.0 * self.epsilon)
    }

    pub fn value(&self, t: f64) -> f64 {
        let e = self.epsilon;
        let (t1, t2) = self.knots();
        if t <= t1 {
            t / (1.0 + 2.0 * e)
        } else if t >= t2 {
            1.0
        } else {
            let u = (t - t1) / (2.0 * e);
            (t1 + 2.0 * e * (u - smoothstep_integral(u))) / (1.0 + 2.0 * e)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let e = self.epsilon;
        let (t1, t2) = self.knots();
        if t <= t1 {
            1.0 / (1.0 + 2.0 * e)
        } else if t >= t2 {
            0.0
        } else {
            (1.0 - smoothstep((t - t1) / (2.0 * e))) / (1.0 + 2.0 * e)
        }
    }

    /// Upper bound for `g'`.
    pub fn derivative_bound(&self) -> f64 {
        1.0 / (1.0 + 2.0 * self.epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraints_at_knots() {
        for e in [0.01, 0.1, 0.3] {
            let g = CutoffG::new(e);
            assert!((g.value(1.0) - 1.0 / (1.0 + 2.0 * e)).abs() < 1e-15);
            assert!((g.value(1.0 + 3.0 * e) - 1.0).abs() < 1e-14);
            assert_eq!(g.value(5.0), 1.0);
            assert_eq!(g.value(0.0), 0.0);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient_and_bound() {
        let g = CutoffG::new(0.1);
        let h = 1e-6;
        for i in 0..400 {
            let t = -0.5 + 2.5 * i as f64 / 399.0;
            let fd = (g.value(t + h) - g.value(t - h)) / (2.0 * h);
            assert!((fd - g.derivative(t)).abs() < 1e-7, "t = {t}");
            assert!(g.derivative(t) >= 0.0 && g.derivative(t) <= g.derivative_bound());
        }
    }

    #[test]
    fn continuous_across_knots() {
        let g = CutoffG::new(0.05);
        for t in [1.05, 1.15] {
            assert!((g.value(t - 1e-12) - g.value(t + 1e-12)).abs() < 1e-10);
            assert!((g.derivative(t - 1e-12) - g.derivative(t + 1e-12)).abs() < 1e-9);
        }
    }
}
