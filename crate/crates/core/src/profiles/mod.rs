//! Radial Hamiltonian profiles on the completion and the interpolation between collars.

mod beta;
mod radial;
mod transfer;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use beta::{
    build_beta, monotone_homotopy_check, BetaParams, BetaSample, EnvelopeReport, GridEnvelopeReport, HomotopyCheck,
    InterpolationBeta,
};
pub use radial::{radial_action, radial_action_side, ProfileMetadata, RadialProfile, Segment, SegmentKind, Side};
pub use transfer::{
    build_transfer_profile, choose_slopes, verify_action_signs, verify_monotone, ActionItem, ActionReport, Checkpoint,
    MonotoneReport, SlopeChoice, SlopeOptions, TransferSchedule, SIGN_MARGIN,
};

/// Positive chord or orbit periods, kept sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpectrumSet {
    values: Vec<f64>,
}

impl SpectrumSet {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidParameter("spectrum values must be finite and positive".into()));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t_min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    /// Distance from `x` to the nearest value, `None` for an empty spectrum.
    pub fn distance(&self, x: f64) -> Option<f64> {
        self.values.iter().map(|v| (v - x).abs()).min_by(f64::total_cmp)
    }
}

impl TryFrom<Vec<f64>> for SpectrumSet {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpectrumSet> for Vec<f64> {
    fn from(s: SpectrumSet) -> Self {
        s.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_sorted_and_checked() {
        let s = SpectrumSet::new(vec![3.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 3.0]);
        assert_eq!(s.distance(2.5), Some(0.5));
        assert!(SpectrumSet::new(vec![0.0]).is_err());
        let j: SpectrumSet = serde_json::from_str("[2.0, 1.0]").unwrap();
        assert_eq!(j.t_min(), Some(1.0));
        assert!(serde_json::from_str::<SpectrumSet>("[-1.0]").is_err());
    }
}
