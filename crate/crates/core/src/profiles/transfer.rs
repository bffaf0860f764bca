use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::radial::{radial_action_side, rounded_polyline, ProfileMetadata, RadialProfile, SegmentKind, Side};
use super::SpectrumSet;
use crate::error::{Error, Result};

/// Options for slope selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeOptions {
    /// Radial scale between the two collars.
    pub c: f64,
    /// Minimum distance from every spectrum value.
    pub gap: f64,
    /// Spectrum on the outer boundary, checked against `a/(4C)`; defaults to the inner spectrum.
    pub boundary: Option<SpectrumSet>,
    /// Number of candidates tried per slope before giving up.
    pub max_candidates: usize,
}

impl SlopeOptions {
    pub fn new(c: f64) -> Self {
        Self { c, gap: 1e-3, boundary: None, max_candidates: 100_000 }
    }
}

/// A selected slope and its distance to the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeChoice {
    pub a: f64,
    pub delta: Option<f64>,
}

/// `a_1 < a_2 < ...` from the candidates `lower + 1, lower + 2, ...` with `a_n` and `a_n/(4C)`
/// at least `gap` away from the spectra.
pub fn choose_slopes(
    spectrum: &SpectrumSet,
    count: usize,
    lower: f64,
    opts: &SlopeOptions,
) -> Result<Vec<SlopeChoice>> {
    if !(lower > 0.0) || !(opts.c > 0.0) || !(opts.gap >= 0.0) {
        return Err(Error::InvalidParameter("lower, C must be positive and gap nonnegative".into()));
    }
    let boundary = opts.boundary.as_ref().unwrap_or(spectrum);
    let mut out = Vec::with_capacity(count);
    let mut j = 1usize;
    while out.len() < count {
        let mut tried = 0;
        loop {
            if tried >= opts.max_candidates {
                return Err(Error::Infeasible(format!("no admissible slope among {tried} candidates above {lower}")));
            }
            let a = lower + j as f64;
            j += 1;
            tried += 1;
            let far = |s: &SpectrumSet, v: f64| s.distance(v).is_none_or(|d| d >= opts.gap);
            if far(spectrum, a) && far(boundary, a / (4.0 * opts.c)) {
                out.push(SlopeChoice { a, delta: spectrum.distance(a) });
                break;
            }
        }
    }
    Ok(out)
}

/// `eps_n`, `a_n`, `r_n`, `A_n` for stages `1..`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSchedule {
    pub c: f64,
    pub eps: Vec<f64>,
    pub slopes: Vec<f64>,
    pub deltas: Vec<Option<f64>>,
    pub radii: Vec<f64>,
    pub plateaus: Vec<f64>,
}

/// The smallest admissible integer radius: `r > max{2 + 2eps/a, (a + eps + eps a)/delta}`.
fn radius_bound(a: f64, eps: f64, delta: Option<f64>) -> f64 {
    let base = 2.0 + 2.0 * eps / a;
    match delta {
        Some(d) => base.max((a + eps + eps * a) / d),
        None => base,
    }
}

impl TransferSchedule {
    /// Slopes from [`choose_slopes`] above `4C`, `eps_n = eps_1 / 2^(n-1)`,
    /// `r_n = max(floor(bound) + 1, r_{n-1} + 1)`, `A_n = a_n (r_n - 1) - eps_n / 2`.
    pub fn derive(spectrum: &SpectrumSet, stages: usize, eps1: f64, opts: &SlopeOptions) -> Result<Self> {
        let choices = choose_slopes(spectrum, stages, 4.0 * opts.c, opts)?;
        let mut s = Self { c: opts.c, eps: vec![], slopes: vec![], deltas: vec![], radii: vec![], plateaus: vec![] };
        let mut prev_r = 0.0f64;
        for (i, ch) in choices.iter().enumerate() {
            let eps = eps1 / 2f64.powi(i as i32);
            let r = (radius_bound(ch.a, eps, ch.delta).floor() + 1.0).max(prev_r + 1.0);
            prev_r = r;
            s.eps.push(eps);
            s.slopes.push(ch.a);
            s.deltas.push(ch.delta);
            s.radii.push(r);
            s.plateaus.push(ch.a * (r - 1.0) - eps / 2.0);
        }
        Ok(s)
    }

    pub fn stages(&self) -> usize {
        self.slopes.len()
    }
}

/// Blend half-width used at every corner.
fn blend_half_width(a: f64, eps: f64) -> f64 {
    0.125 * eps / a
}

/// The stage-`n_index` (1-based) profile: `-eps` inside, slope `a` through the collar, the plateau `A`,
/// then slope `a/4` along `(a/4)(r - 2 r_n) + a(r_n - 1)`, all corners rounded.
pub fn build_transfer_profile(
    n_index: usize,
    spectrum: &SpectrumSet,
    boundary: Option<&SpectrumSet>,
    schedule: &TransferSchedule,
) -> Result<RadialProfile> {
    if n_index == 0 || n_index > schedule.stages() {
        return Err(Error::InvalidParameter(format!("stage {n_index} not in 1..={}", schedule.stages())));
    }
    let boundary = boundary.unwrap_or(spectrum);
    let i = n_index - 1;
    let (c, eps, a, r, big_a) =
        (schedule.c, schedule.eps[i], schedule.slopes[i], schedule.radii[i], schedule.plateaus[i]);
    if !(c > 0.0) {
        return Err(Error::Precondition("C must be positive".into()));
    }
    if schedule.eps[..=i].iter().any(|&e| !(e > 0.0)) || schedule.eps[..=i].windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Precondition("eps sequence must be positive and decreasing".into()));
    }
    if let Some(t) = spectrum.t_min() {
        if !(schedule.eps[0] < t / (1.0 + t)) {
            return Err(Error::Precondition(format!(
                "eps exceeds T_min/(1+T_min): eps_1 = {} >= {}",
                schedule.eps[0],
                t / (1.0 + t)
            )));
        }
    }
    if schedule.slopes[..=i].windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("slopes must increase".into()));
    }
    if !(a > 4.0 * c) {
        return Err(Error::Precondition(format!("slope must exceed 4C: a = {a}, 4C = {}", 4.0 * c)));
    }
    let delta = spectrum.distance(a);
    if delta == Some(0.0) {
        return Err(Error::Precondition(format!("slope a = {a} is a chord period")));
    }
    if boundary.distance(a / (4.0 * c)) == Some(0.0) {
        return Err(Error::Precondition(format!("a/(4C) = {} is a chord period on the boundary", a / (4.0 * c))));
    }
    let bound = radius_bound(a, eps, delta);
    if !(r > bound) {
        return Err(Error::Precondition(format!(
            "radius r = {r} must exceed max{{2 + 2eps/a, (a + eps + eps a)/delta}} = {bound}"
        )));
    }
    let top = a * (r - 1.0);
    if !(big_a > top - eps && big_a < top) {
        return Err(Error::Precondition(format!("plateau A = {big_a} must lie in ({}, {top})", top - eps)));
    }

    let w = blend_half_width(a, eps);
    let lines = [(0.0, -eps), (a, -a * (1.0 + eps)), (0.0, big_a), (a / 4.0, a * (r - 1.0) - a * r / 2.0)];
    let corners = [1.0 + eps - eps / a, 1.0 + eps + big_a / a, 2.0 * r + 4.0 * (big_a - a * (r - 1.0)) / a];
    let segments = rounded_polyline(0.0, &lines, &corners, w)?;
    RadialProfile::new(
        segments,
        Some(ProfileMetadata { index: n_index, a, eps, r, plateau: big_a, c, delta, blend_width: 2.0 * w }),
    )
}

/// One row of the action ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionItem {
    pub item: char,
    pub expected: String,
    pub pass: bool,
    pub candidates: usize,
    /// Smallest action for positive items, largest for negative ones.
    pub extreme_action: f64,
    pub witness_r: f64,
    /// Distance of the extreme action (and any chain bound) from violating the expected sign.
    pub margin: f64,
    /// The bound re-evaluated from the inequality chain, where one applies.
    pub chain_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub index: usize,
    pub items: Vec<ActionItem>,
    pub pass: bool,
}

/// Margins must exceed this to count as a pass.
pub const SIGN_MARGIN: f64 = 1e-12;

fn joins(h: &RadialProfile) -> Vec<(f64, f64)> {
    h.segments
        .iter()
        .filter(|s| matches!(s.kind, SegmentKind::SmoothJoin { .. }))
        .map(|s| (s.start, s.end.expect("joins are bounded")))
        .collect()
}

fn blend_samples(span: (f64, f64), count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |j| span.0 + (span.1 - span.0) * (j as f64 + 0.5) / count as f64)
}

/// Radius in `span` where the (monotone) slope equals `target`, if any.
fn solve_slope(h: &RadialProfile, span: (f64, f64), target: f64) -> Option<f64> {
    let f = |r: f64| h.derivative_side(r, Side::Right) - target;
    let (mut lo, mut hi) = span;
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn extreme(rs: &[f64], h: &RadialProfile, positive: bool) -> (f64, f64) {
    let mut best = (if positive { f64::INFINITY } else { f64::NEG_INFINITY }, f64::NAN);
    for &r in rs {
        let act = radial_action_side(h, r, Side::Right);
        if (positive && act < best.0) || (!positive && act > best.0) {
            best = (act, r);
        }
    }
    best
}

/// Samples candidate chord radii in each region of a transfer profile and checks the action signs
/// `(a) +eps, (b) +, (c) -, (d) -A, (e) -`.
pub fn verify_action_signs(
    h: &RadialProfile,
    spectrum: Option<&SpectrumSet>,
    boundary: Option<&SpectrumSet>,
    samples_per_blend: usize,
) -> Result<ActionReport> {
    let meta = h.metadata.ok_or_else(|| Error::InvalidParameter("profile carries no transfer metadata".into()))?;
    let j = joins(h);
    if j.len() != 3 || h.segments.len() != 7 {
        return Err(Error::Shape("expected the seven-segment transfer layout".into()));
    }
    let (a, eps, r_n, big_a) = (meta.a, meta.eps, meta.r, meta.plateau);
    let slope = |r: f64| h.derivative_side(r, Side::Right);
    let boundary = boundary.or(spectrum);
    let n = samples_per_blend.max(1);

    // (a) constant orbits inside
    let ra = 0.5 * (h.segments[0].start + j[0].0);
    let act_a = radial_action_side(h, ra, Side::Right);
    let item_a = ActionItem {
        item: 'a',
        expected: "+eps".into(),
        pass: (act_a - eps).abs() <= SIGN_MARGIN && act_a > SIGN_MARGIN,
        candidates: 1,
        extreme_action: act_a,
        witness_r: ra,
        margin: act_a,
        chain_bound: None,
    };

    // (b) chords through the first join, positive slopes
    let mut rb: Vec<f64> = blend_samples(j[0], n).filter(|&r| slope(r) > 0.0).collect();
    if let Some(s) = spectrum {
        rb.extend(s.values().iter().filter(|&&t| t < a).filter_map(|&t| solve_slope(h, j[0], t)));
    }
    let (act_b, wb) = extreme(&rb, h, true);
    let item_b = ActionItem {
        item: 'b',
        expected: "+".into(),
        pass: !rb.is_empty() && act_b > SIGN_MARGIN,
        candidates: rb.len(),
        extreme_action: act_b,
        witness_r: wb,
        margin: act_b,
        chain_bound: None,
    };

    // (c) second join, slopes at most a - delta
    let cap = meta.delta.map_or(a, |d| a - d);
    let mut rc: Vec<f64> = blend_samples(j[1], n).filter(|&r| slope(r) > 0.0 && slope(r) <= cap).collect();
    if let Some(s) = spectrum {
        rc.extend(s.values().iter().filter(|&&t| t < a).filter_map(|&t| solve_slope(h, j[1], t)));
    }
    let (act_c, wc) = extreme(&rc, h, false);
    let delta = meta.delta.unwrap_or(0.0);
    let chain_c = -delta * r_n + a + a * eps + eps;
    let pointwise_c = rc
        .iter()
        .map(|&r| (-delta * r + a + a * eps + eps) - radial_action_side(h, r, Side::Right))
        .fold(f64::INFINITY, f64::min);
    let margin_c = if rc.is_empty() { f64::INFINITY } else { (-act_c).min(pointwise_c) };
    let item_c = ActionItem {
        item: 'c',
        expected: "-".into(),
        pass: margin_c > SIGN_MARGIN && (meta.delta.is_none() || -chain_c > SIGN_MARGIN),
        candidates: rc.len(),
        extreme_action: act_c,
        witness_r: wc,
        margin: if meta.delta.is_some() { margin_c.min(-chain_c) } else { margin_c },
        chain_bound: meta.delta.map(|_| chain_c),
    };

    // (d) constant orbits on the plateau
    let rd = 0.5 * (j[1].1 + j[2].0);
    let act_d = radial_action_side(h, rd, Side::Right);
    let item_d = ActionItem {
        item: 'd',
        expected: "-A".into(),
        pass: (act_d + big_a).abs() <= SIGN_MARGIN * big_a.max(1.0) && act_d < -SIGN_MARGIN,
        candidates: 1,
        extreme_action: act_d,
        witness_r: rd,
        margin: -act_d,
        chain_bound: None,
    };

    // (e) third join, towards slope a/4 in the outer collar
    let mut re: Vec<f64> = blend_samples(j[2], n).filter(|&r| slope(r) > 0.0).collect();
    if let Some(s) = boundary {
        re.extend(
            s.values().iter().filter(|&&t| meta.c * t < a / 4.0).filter_map(|&t| solve_slope(h, j[2], meta.c * t)),
        );
    }
    let (act_e, we) = extreme(&re, h, false);
    let chain_e = 0.5 * a * (2.0 - r_n) + eps;
    let margin_e = if re.is_empty() { f64::INFINITY } else { (-act_e).min(chain_e - act_e) };
    let item_e = ActionItem {
        item: 'e',
        expected: "-".into(),
        pass: margin_e > SIGN_MARGIN && -chain_e > SIGN_MARGIN,
        candidates: re.len(),
        extreme_action: act_e,
        witness_r: we,
        margin: margin_e.min(-chain_e),
        chain_bound: Some(chain_e),
    };

    let items = vec![item_a, item_b, item_c, item_d, item_e];
    let pass = items.iter().all(|i| i.pass);
    Ok(ActionReport { index: meta.index, items, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub r: f64,
    /// The same point in the outer radial coordinate, `C r`.
    pub r_outer: f64,
    pub lower: f64,
    pub upper: f64,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub pass: bool,
    pub min_gap: f64,
    pub witness_r: f64,
    pub grid: usize,
    pub r_max: f64,
    pub checkpoint: Option<Checkpoint>,
}

/// Checks `h1 <= h2` on a grid over `[0, r_max]`, where `r_max` covers every breakpoint of
/// both profiles twice over, and at `r = 2 r` of the later stage when metadata is present.
pub fn verify_monotone(h1: &RadialProfile, h2: &RadialProfile, grid: usize) -> Result<MonotoneReport> {
    if (h1.start() - h2.start()).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("profiles start at {} and {}", h1.start(), h2.start())));
    }
    let last = h1.breakpoints().into_iter().chain(h2.breakpoints()).fold(1.0f64, f64::max);
    let check_r = h2.metadata.map(|m| 2.0 * m.r);
    let r_max = 2.0 * last.max(check_r.unwrap_or(0.0));
    let a = h1.start();
    let m = grid.max(2);
    let (min_gap, witness_r) = (0..m)
        .into_par_iter()
        .map(|i| {
            let r = a + (r_max - a) * i as f64 / (m - 1) as f64;
            (h2.value(r) - h1.value(r), r)
        })
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)))
        .expect("nonempty grid");
    let c = h2.metadata.map_or(1.0, |m| m.c);
    let checkpoint = check_r.map(|r| {
        let (lower, upper) = (h1.value(r), h2.value(r));
        Checkpoint { r, r_outer: c * r, lower, upper, strict: lower < upper }
    });
    let pass = min_gap >= -1e-12 && checkpoint.is_none_or(|c| c.strict);
    Ok(MonotoneReport { pass, min_gap, witness_r, grid: m, r_max, checkpoint })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spectrum() -> SpectrumSet {
        SpectrumSet::new(vec![PI, 2.0 * PI, 3.0 * PI]).unwrap()
    }

    #[test]
    fn slope_selection() {
        let s = spectrum();
        let ch = choose_slopes(&s, 3, 8.0, &SlopeOptions::new(2.0)).unwrap();
        let a: Vec<f64> = ch.iter().map(|c| c.a).collect();
        assert_eq!(a, vec![9.0, 10.0, 11.0]);
        assert!((ch[0].delta.unwrap() - (3.0 * PI - 9.0)).abs() < 1e-15);
        let empty = SpectrumSet::new(vec![]).unwrap();
        let ch = choose_slopes(&empty, 3, 5.0, &SlopeOptions::new(1.0)).unwrap();
        assert_eq!(ch.iter().map(|c| c.a).collect::<Vec<_>>(), vec![6.0, 7.0, 8.0]);
        assert!(ch[0].delta.is_none());
        // exact hit is skipped
        let hit = SpectrumSet::new(vec![9.0]).unwrap();
        assert_eq!(choose_slopes(&hit, 1, 8.0, &SlopeOptions::new(2.0)).unwrap()[0].a, 10.0);
    }

    #[test]
    fn schedule_values() {
        let sch = TransferSchedule::derive(&spectrum(), 3, 0.1, &SlopeOptions::new(2.0)).unwrap();
        assert_eq!(sch.radii, vec![24.0, 25.0, 26.0]);
        assert_eq!(sch.eps, vec![0.1, 0.05, 0.025]);
    }

    #[test]
    fn preconditions_named() {
        let s = SpectrumSet::new(vec![1.0, 5.0]).unwrap();
        let mut sch = TransferSchedule::derive(&s, 1, 0.1, &SlopeOptions::new(2.0)).unwrap();
        sch.eps[0] = 0.6;
        let e = build_transfer_profile(1, &s, None, &sch).unwrap_err().to_string();
        assert!(e.contains("eps exceeds T_min/(1+T_min)"), "{e}");
        let mut sch = TransferSchedule::derive(&spectrum(), 1, 0.1, &SlopeOptions::new(2.0)).unwrap();
        sch.slopes[0] = 7.0;
        let e = build_transfer_profile(1, &spectrum(), None, &sch).unwrap_err().to_string();
        assert!(e.contains("slope must exceed 4C"), "{e}");
        let mut sch = TransferSchedule::derive(&spectrum(), 1, 0.1, &SlopeOptions::new(2.0)).unwrap();
        sch.radii[0] = 20.0;
        assert!(build_transfer_profile(1, &spectrum(), None, &sch).is_err());
    }

    #[test]
    fn slope_bounds_hold() {
        let sch = TransferSchedule::derive(&spectrum(), 2, 0.1, &SlopeOptions::new(2.0)).unwrap();
        let h = build_transfer_profile(1, &spectrum(), None, &sch).unwrap();
        for (_, _, lo, hi) in h.slope_bounds() {
            assert!(lo >= 0.0 && hi <= 9.0);
        }
        assert!((h.value(0.5) + 0.1).abs() < 1e-15);
        assert!((h.value(1.0 + 0.1 + 100.0 / 9.0) - 100.0).abs() < 0.01);
    }

    #[test]
    fn ledger_passes() {
        let s = spectrum();
        let sch = TransferSchedule::derive(&s, 3, 0.1, &SlopeOptions::new(2.0)).unwrap();
        for n in 1..=3 {
            let h = build_transfer_profile(n, &s, None, &sch).unwrap();
            let rep = verify_action_signs(&h, Some(&s), None, 100).unwrap();
            assert!(rep.pass, "{rep:#?}");
        }
    }

    #[test]
    fn consecutive_profiles_increase() {
        let s = spectrum();
        let sch = TransferSchedule::derive(&s, 3, 0.1, &SlopeOptions::new(2.0)).unwrap();
        let hs: Vec<_> = (1..=3).map(|n| build_transfer_profile(n, &s, None, &sch).unwrap()).collect();
        for w in hs.windows(2) {
            let rep = verify_monotone(&w[0], &w[1], 10_000).unwrap();
            assert!(rep.pass, "{rep:?}");
            let rev = verify_monotone(&w[1], &w[0], 10_000).unwrap();
            assert!(!rev.pass);
        }
        let same = verify_monotone(&hs[0], &hs[0], 100).unwrap();
        assert_eq!(same.min_gap, 0.0);
    }
}
