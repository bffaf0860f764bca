use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::z2::Z2Matrix;
use crate::error::{Error, Result};

/// Graded spaces `V_0 -> V_1 -> ...` given by their dimension in each degree and the
/// consecutive transition maps; degrees missing from a stage have dimension 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedSystem {
    pub stages: Vec<BTreeMap<i64, usize>>,
    /// `transitions[s][k]` maps degree `k` of stage `s` into stage `s + 1`; missing entries are zero.
    pub transitions: Vec<BTreeMap<i64, Z2Matrix>>,
    /// Additional maps `h_{from,to}` that must agree with the composite of the transitions.
    #[serde(default)]
    pub extra: Vec<ExtraMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraMap {
    pub from: usize,
    pub to: usize,
    pub maps: BTreeMap<i64, Z2Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    /// Dimension of `(sum V_s) / H` for the finite system.
    pub finite: BTreeMap<i64, usize>,
    /// For degrees whose last `window` stages carry equal dimensions and equal maps, the limit of
    /// the system continued by repeating the last map forever.
    pub stable: BTreeMap<i64, Option<usize>>,
    /// The stable value where available, else the finite one.
    pub dims: BTreeMap<i64, usize>,
    pub window: usize,
}

impl DirectedSystem {
    pub fn new(stages: Vec<BTreeMap<i64, usize>>, transitions: Vec<BTreeMap<i64, Z2Matrix>>) -> Result<Self> {
        let s = Self { stages, transitions, extra: vec![] };
        s.check_shapes()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn dim(&self, stage: usize, degree: i64) -> usize {
        self.stages[stage].get(&degree).copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> =
            self.stages.iter().flat_map(|s| s.iter().filter(|(_, v)| **v > 0).map(|(k, _)| *k)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The map from `stage` to `stage + 1` in `degree`, zero when not given.
    pub fn transition(&self, stage: usize, degree: i64) -> Z2Matrix {
        self.transitions[stage]
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| Z2Matrix::zeros(self.dim(stage + 1, degree), self.dim(stage, degree)))
    }

    /// `h_{from,to}` as a composite of transitions.
    pub fn composite(&self, from: usize, to: usize, degree: i64) -> Result<Z2Matrix> {
        if from > to || to >= self.len() {
            return Err(Error::InvalidParameter(format!("no map from stage {from} to stage {to}")));
        }
        let mut m = Z2Matrix::identity(self.dim(from, degree));
        for s in from..to {
            m = self.transition(s, degree).mul(&m)?;
        }
        Ok(m)
    }

    fn check_shapes(&self) -> Result<()> {
        if self.transitions.len() + 1 != self.stages.len().max(1) {
            return Err(Error::Shape(format!(
                "{} stages need {} transitions",
                self.len(),
                self.len().saturating_sub(1)
            )));
        }
        for (s, maps) in self.transitions.iter().enumerate() {
            for (k, m) in maps {
                if m.nrows() != self.dim(s + 1, *k) || m.ncols() != self.dim(s, *k) {
                    return Err(Error::Shape(format!("transition {s} in degree {k} has the wrong shape")));
                }
            }
        }
        Ok(())
    }

    /// Every extra map agrees with the composite of transitions: `h_{ac} = h_{bc} h_{ab}`.
    pub fn check_coherence(&self) -> Result<()> {
        self.check_shapes()?;
        for e in &self.extra {
            for k in self.degrees() {
                let given =
                    e.maps.get(&k).cloned().unwrap_or_else(|| Z2Matrix::zeros(self.dim(e.to, k), self.dim(e.from, k)));
                if given != self.composite(e.from, e.to, k)? {
                    return Err(Error::Incoherent(format!(
                        "h_({},{}) in degree {k} differs from the composite of transitions",
                        e.from, e.to
                    )));
                }
            }
        }
        Ok(())
    }

    /// The system restricted to the given increasing stages, with composite maps.
    pub fn subsystem(&self, indices: &[usize]) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.last().is_some_and(|&i| i >= self.len()) {
            return Err(Error::InvalidParameter("stages must increase and exist".into()));
        }
        let stages = indices.iter().map(|&i| self.stages[i].clone()).collect();
        let transitions = indices
            .windows(2)
            .map(|w| self.degrees().into_iter().map(|k| Ok((k, self.composite(w[0], w[1], k)?))).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Self::new(stages, transitions)
    }
}

/// `dim (sum V_s) / H` in one degree, with `H` spanned by `i_{s+1} h(v) - i_s v`.
fn finite_colimit(sys: &DirectedSystem, k: i64) -> usize {
    let offsets: Vec<usize> = sys
        .stages
        .iter()
        .scan(0, |acc, _| Some(*acc))
        .zip(0..)
        .map(|(_, s)| (0..s).map(|t| sys.dim(t, k)).sum())
        .collect();
    let total: usize = (0..sys.len()).map(|s| sys.dim(s, k)).sum();
    let mut entries = Vec::new();
    let mut col = 0;
    for s in 0..sys.len().saturating_sub(1) {
        let h = sys.transition(s, k);
        for j in 0..sys.dim(s, k) {
            entries.push((offsets[s] + j, col));
            entries.extend(h.column(j).iter().map(|&i| (offsets[s + 1] + i, col)));
            col += 1;
        }
    }
    let rel = Z2Matrix::from_entries(total, col, entries).expect("indices in range");
    total - rel.rank()
}

/// `lim` over a finite chain; see [`LimitReport`] for the stabilized value.
pub fn direct_limit(sys: &DirectedSystem, window: usize) -> Result<LimitReport> {
    sys.check_coherence()?;
    let window = window.max(1);
    let mut report = LimitReport { finite: BTreeMap::new(), stable: BTreeMap::new(), dims: BTreeMap::new(), window };
    let degrees = if sys.degrees().is_empty() { vec![0] } else { sys.degrees() };
    for k in degrees {
        let finite = finite_colimit(sys, k);
        let stable = stable_limit(sys, k, window)?;
        report.finite.insert(k, finite);
        report.stable.insert(k, stable);
        report.dims.insert(k, stable.unwrap_or(finite));
    }
    Ok(report)
}

fn stable_limit(sys: &DirectedSystem, k: i64, window: usize) -> Result<Option<usize>> {
    let n = sys.len();
    if n < window.max(2) {
        return Ok(None);
    }
    let tail = n - window..n;
    let d = sys.dim(n - 1, k);
    if tail.clone().any(|s| sys.dim(s, k) != d) {
        return Ok(None);
    }
    let last = sys.transition(n - 2, k);
    if (n - window..n - 1).any(|s| sys.transition(s, k) != last) {
        return Ok(None);
    }
    // colimit of V -h-> V -h-> ... is the eventual image of h
    Ok(Some(last.pow(d as u32)?.rank()))
}

#[cfg(test)]
mod tests {
    use super::super::models::{hf_system, identity_system, zero_system};
    use super::*;

    #[test]
    fn constant_systems() {
        let id = direct_limit(&identity_system(10), 3).unwrap();
        assert_eq!(id.dims, BTreeMap::from([(0, 1)]));
        assert_eq!(id.finite, BTreeMap::from([(0, 1)]));
        let zero = direct_limit(&zero_system(10), 3).unwrap();
        assert_eq!(zero.dims, BTreeMap::from([(0, 0)]));
        // the last stage survives in the truncated chain
        assert_eq!(zero.finite, BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn hf_limit_vanishes() {
        for n in 1..=3 {
            let sys = hf_system(n, 12);
            let r = direct_limit(&sys, 3).unwrap();
            for (k, v) in &r.stable {
                if *k <= n as i64 * 8 {
                    assert_eq!(*v, Some(0), "degree {k}");
                }
            }
        }
    }

    #[test]
    fn incoherent_extra_map() {
        let mut sys = identity_system(4);
        sys.extra.push(ExtraMap { from: 0, to: 2, maps: BTreeMap::from([(0, Z2Matrix::zeros(1, 1))]) });
        assert!(matches!(direct_limit(&sys, 3), Err(Error::Incoherent(_))));
        sys.extra[0].maps.insert(0, Z2Matrix::identity(1));
        assert!(direct_limit(&sys, 3).is_ok());
    }

    #[test]
    fn cofinal_subsystem() {
        let sys = identity_system(9);
        let sub = sys.subsystem(&[0, 3, 5, 8]).unwrap();
        assert_eq!(direct_limit(&sub, 1).unwrap().finite, direct_limit(&sys, 1).unwrap().finite);
    }
}
