use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for deciding that `r` sits on a breakpoint.
const KNOT_TOL: f64 = 1e-14;

pub(crate) fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

fn smoothstep_integral(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * u * (2.5 + u * (-3.0 + u))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentKind {
    Constant {
        value: f64,
    },
    Linear {
        slope: f64,
        value_at_start: f64,
    },
    /// `h' = left + (right - left) S((r - start)/(end - start))` with the quintic smoothstep `S`.
    SmoothJoin {
        slope_left: f64,
        slope_right: f64,
        value_at_start: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    /// `None` for the unbounded last segment.
    pub end: Option<f64>,
    #[serde(flatten)]
    pub kind: SegmentKind,
}

impl Segment {
    fn end_or_inf(&self) -> f64 {
        self.end.unwrap_or(f64::INFINITY)
    }

    fn value(&self, r: f64) -> f64 {
        match self.kind {
            SegmentKind::Constant { value } => value,
            SegmentKind::Linear { slope, value_at_start } => value_at_start + slope * (r - self.start),
            SegmentKind::SmoothJoin { slope_left, slope_right, value_at_start } => {
                let w = self.end_or_inf() - self.start;
                let u = (r - self.start) / w;
                value_at_start + slope_left * (r - self.start) + (slope_right - slope_left) * w * smoothstep_integral(u)
            }
        }
    }

    fn slope(&self, r: f64) -> f64 {
        match self.kind {
            SegmentKind::Constant { .. } => 0.0,
            SegmentKind::Linear { slope, .. } => slope,
            SegmentKind::SmoothJoin { slope_left, slope_right, .. } => {
                let u = (r - self.start) / (self.end_or_inf() - self.start);
                slope_left + (slope_right - slope_left) * smoothstep(u)
            }
        }
    }

    fn slope_range(&self) -> (f64, f64) {
        match self.kind {
            SegmentKind::Constant { .. } => (0.0, 0.0),
            SegmentKind::Linear { slope, .. } => (slope, slope),
            SegmentKind::SmoothJoin { slope_left, slope_right, .. } => {
                (slope_left.min(slope_right), slope_left.max(slope_right))
            }
        }
    }

    fn end_value(&self) -> f64 {
        self.value(self.end_or_inf())
    }
}

/// Parameters a transfer profile was built from. `r` is the radial coordinate of the
/// inner domain; the outer radial coordinate is `C r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub index: usize,
    pub a: f64,
    pub eps: f64,
    pub r: f64,
    pub plateau: f64,
    pub c: f64,
    /// Distance from `a` to the spectrum, if the spectrum is nonempty.
    pub delta: Option<f64>,
    pub blend_width: f64,
}

/// Which one-sided derivative to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// A continuous, piecewise-C^1 function on `[0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub segments: Vec<Segment>,
    pub metadata: Option<ProfileMetadata>,
}

impl RadialProfile {
    /// Checks contiguity and continuity.
    pub fn new(segments: Vec<Segment>, metadata: Option<ProfileMetadata>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("profile needs at least one segment".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            let last = i + 1 == segments.len();
            match s.end {
                None if !last => return Err(Error::InvalidParameter(format!("segment {i} is unbounded but not last"))),
                Some(e) if !(e > s.start) => return Err(Error::InvalidParameter(format!("segment {i} is empty"))),
                _ => {}
            }
            if matches!(s.kind, SegmentKind::SmoothJoin { .. }) && s.end.is_none() {
                return Err(Error::InvalidParameter("a smooth join needs a finite end".into()));
            }
            if let Some(next) = segments.get(i + 1) {
                let e = s.end_or_inf();
                if (next.start - e).abs() > KNOT_TOL * e.abs().max(1.0) {
                    return Err(Error::InvalidParameter(format!("gap between segments {i} and {}", i + 1)));
                }
                let jump = (next.value(next.start) - s.end_value()).abs();
                if jump > 1e-9 * s.end_value().abs().max(1.0) {
                    return Err(Error::InvalidParameter(format!("jump of {jump:e} at r = {e}")));
                }
            }
        }
        Ok(Self { segments, metadata })
    }

    /// The lowest `r` covered.
    pub fn start(&self) -> f64 {
        self.segments[0].start
    }

    /// Breakpoints between segments.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().filter_map(|s| s.end).collect()
    }

    fn locate(&self, r: f64) -> usize {
        let i = self.segments.partition_point(|s| s.start <= r);
        i.saturating_sub(1)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.segments[self.locate(r)].value(r)
    }

    /// `h'(r)`; errors at a breakpoint where the one-sided slopes differ.
    pub fn derivative(&self, r: f64) -> Result<f64> {
        let i = self.locate(r);
        let s = &self.segments[i];
        if i > 0 && (r - s.start).abs() <= KNOT_TOL * r.abs().max(1.0) {
            let left = self.segments[i - 1].slope(r);
            let right = s.slope(r);
            if (left - right).abs() > 1e-12 * left.abs().max(right.abs()).max(1.0) {
                return Err(Error::AtKink(r));
            }
        }
        Ok(s.slope(r))
    }

    pub fn derivative_side(&self, r: f64, side: Side) -> f64 {
        let i = self.locate(r);
        let s = &self.segments[i];
        if side == Side::Left && i > 0 && (r - s.start).abs() <= KNOT_TOL * r.abs().max(1.0) {
            return self.segments[i - 1].slope(r);
        }
        s.slope(r)
    }

    /// Per segment: `(start, end, min slope, max slope)`.
    pub fn slope_bounds(&self) -> Vec<(f64, Option<f64>, f64, f64)> {
        self.segments
            .iter()
            .map(|s| {
                let (lo, hi) = s.slope_range();
                (s.start, s.end, lo, hi)
            })
            .collect()
    }

    /// `(r, h, h', r h' - h)` at `count` equally spaced radii in `[start, r_max]`.
    pub fn samples(&self, r_max: f64, count: usize) -> Vec<(f64, f64, f64, f64)> {
        let a = self.start();
        let count = count.max(2);
        (0..count)
            .map(|i| {
                let r = a + (r_max - a) * i as f64 / (count - 1) as f64;
                let d = self.derivative_side(r, Side::Right);
                let h = self.value(r);
                (r, h, d, r * d - h)
            })
            .collect()
    }
}

/// `r h'(r) - h(r)`, minus the intercept of the tangent line at `r`.
pub fn radial_action(h: &RadialProfile, r: f64) -> Result<f64> {
    Ok(r * h.derivative(r)? - h.value(r))
}

/// [`radial_action`] with an explicit side at breakpoints.
pub fn radial_action_side(h: &RadialProfile, r: f64, side: Side) -> f64 {
    r * h.derivative_side(r, side) - h.value(r)
}

/// Segments for `max`-like corners between consecutive lines, each rounded by a
/// [`SegmentKind::SmoothJoin`] of half-width `w` centred on the corner.
///
/// `lines` are `(slope, intercept)` pairs, `corners[i]` the intersection of lines `i` and `i+1`.
pub(crate) fn rounded_polyline(start: f64, lines: &[(f64, f64)], corners: &[f64], w: f64) -> Result<Vec<Segment>> {
    assert_eq!(lines.len(), corners.len() + 1);
    let line_kind = |(s, b): (f64, f64), at: f64| {
        if s == 0.0 {
            SegmentKind::Constant { value: b }
        } else {
            SegmentKind::Linear { slope: s, value_at_start: s * at + b }
        }
    };
    let mut segs = Vec::new();
    let mut cursor = start;
    for (i, &c) in corners.iter().enumerate() {
        let (l, r) = (lines[i], lines[i + 1]);
        if !(c - w > cursor) {
            return Err(Error::Infeasible(format!("corner at r = {c} leaves no room for the preceding segment")));
        }
        segs.push(Segment { start: cursor, end: Some(c - w), kind: line_kind(l, cursor) });
        segs.push(Segment {
            start: c - w,
            end: Some(c + w),
            kind: SegmentKind::SmoothJoin { slope_left: l.0, slope_right: r.0, value_at_start: l.0 * (c - w) + l.1 },
        });
        cursor = c + w;
    }
    segs.push(Segment { start: cursor, end: None, kind: line_kind(lines[lines.len() - 1], cursor) });
    Ok(segs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corner() -> RadialProfile {
        // constant -1 then slope 2 through the corner at r = 1
        RadialProfile::new(rounded_polyline(0.0, &[(0.0, -1.0), (2.0, -3.0)], &[1.0], 0.1).unwrap(), None).unwrap()
    }

    #[test]
    fn join_meets_both_lines() {
        let h = corner();
        assert!((h.value(0.9) + 1.0).abs() < 1e-15);
        assert!((h.value(1.1) - (2.0 * 1.1 - 3.0)).abs() < 1e-14);
        assert!((h.value(3.0) - 3.0).abs() < 1e-14);
        assert_eq!(h.derivative(0.9).unwrap(), 0.0);
        assert!((h.derivative(1.1).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn action_examples() {
        let h = corner();
        assert!((radial_action(&h, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((radial_action(&h, 2.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((radial_action(&h, 7.5).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn action_is_tangent_intercept() {
        let h = corner();
        for i in 0..50 {
            let r = 0.905 + 0.19 * i as f64 / 49.0;
            let d = h.derivative(r).unwrap();
            // tangent through (r, h(r)) evaluated at 0
            let intercept = h.value(r) - d * r;
            assert!((radial_action(&h, r).unwrap() + intercept).abs() < 1e-12);
        }
    }

    #[test]
    fn kinks_need_a_side() {
        let segs = vec![
            Segment { start: 0.0, end: Some(1.0), kind: SegmentKind::Constant { value: 0.0 } },
            Segment { start: 1.0, end: None, kind: SegmentKind::Linear { slope: 1.0, value_at_start: 0.0 } },
        ];
        let h = RadialProfile::new(segs, None).unwrap();
        assert!(matches!(radial_action(&h, 1.0), Err(Error::AtKink(_))));
        assert_eq!(radial_action_side(&h, 1.0, Side::Left), 0.0);
        assert_eq!(radial_action_side(&h, 1.0, Side::Right), 1.0);
    }

    #[test]
    fn discontinuity_rejected() {
        let segs = vec![
            Segment { start: 0.0, end: Some(1.0), kind: SegmentKind::Constant { value: 0.0 } },
            Segment { start: 1.0, end: None, kind: SegmentKind::Constant { value: 1.0 } },
        ];
        assert!(RadialProfile::new(segs, None).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let h = corner();
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains(r#""kind":"smooth_join""#));
        let back: RadialProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }
}
