use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::z2::Z2Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub degree: i64,
    pub action: f64,
}

impl Generator {
    pub fn new(id: impl Into<String>, degree: i64, action: f64) -> Self {
        Self { id: id.into(), degree, action }
    }
}

/// Generators with degree and action, and `d` as a square matrix with `d[x_minus][x_plus] = 1`
/// when `x_minus` appears in `d x_plus`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexRaw", into = "ComplexRaw")]
pub struct FilteredZ2Complex {
    generators: Vec<Generator>,
    differential: Z2Matrix,
}

#[derive(Serialize, Deserialize)]
struct ComplexRaw {
    generators: Vec<Generator>,
    /// `[x_minus, x_plus]` id pairs.
    #[serde(default)]
    differential: Vec<[String; 2]>,
}

impl TryFrom<ComplexRaw> for FilteredZ2Complex {
    type Error = Error;
    fn try_from(r: ComplexRaw) -> Result<Self> {
        let index: HashMap<&str, usize> = r.generators.iter().enumerate().map(|(i, g)| (g.id.as_str(), i)).collect();
        let look =
            |id: &str| index.get(id).copied().ok_or_else(|| Error::Input(format!("unknown generator id {id:?}")));
        let entries = r.differential.iter().map(|[m, p]| Ok((look(m)?, look(p)?))).collect::<Result<Vec<_>>>()?;
        let n = r.generators.len();
        FilteredZ2Complex::new(r.generators, Z2Matrix::from_entries(n, n, entries)?)
    }
}

impl From<FilteredZ2Complex> for ComplexRaw {
    fn from(c: FilteredZ2Complex) -> Self {
        let differential =
            c.differential.entries().map(|(m, p)| [c.generators[m].id.clone(), c.generators[p].id.clone()]).collect();
        ComplexRaw { generators: c.generators, differential }
    }
}

/// One offending entry or product entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub x_minus: String,
    pub x_plus: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `d^2` has a nonzero entry here.
    DSquared,
    Degree,
    Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl FilteredZ2Complex {
    pub fn new(generators: Vec<Generator>, differential: Z2Matrix) -> Result<Self> {
        let n = generators.len();
        if differential.nrows() != n || differential.ncols() != n {
            return Err(Error::Shape(format!("differential must be {n}x{n}")));
        }
        let mut seen = HashMap::new();
        for g in &generators {
            if !g.action.is_finite() {
                return Err(Error::Input(format!("generator {:?} has non-finite action", g.id)));
            }
            if seen.insert(g.id.as_str(), ()).is_some() {
                return Err(Error::Input(format!("duplicate generator id {:?}", g.id)));
            }
        }
        Ok(Self { generators, differential })
    }

    pub fn from_pairs(generators: Vec<Generator>, pairs: &[(&str, &str)]) -> Result<Self> {
        ComplexRaw { generators, differential: pairs.iter().map(|(m, p)| [m.to_string(), p.to_string()]).collect() }
            .try_into()
    }

    pub fn empty() -> Self {
        Self { generators: vec![], differential: Z2Matrix::zeros(0, 0) }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn differential(&self) -> &Z2Matrix {
        &self.differential
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.generators.iter().map(|g| g.degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    fn in_degree(&self, k: i64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.generators[i].degree == k).collect()
    }

    /// The same complex with `prefix` prepended to every id.
    pub fn prefixed(&self, prefix: &str) -> Self {
        let generators =
            self.generators.iter().map(|g| Generator { id: format!("{prefix}{}", g.id), ..g.clone() }).collect();
        Self { generators, differential: self.differential.clone() }
    }

    pub fn direct_sum(&self, other: &FilteredZ2Complex) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Self::new(gens, Z2Matrix::block_diag(&self.differential, &other.differential))
    }

    fn violation(&self, kind: ViolationKind, m: usize, p: usize) -> Violation {
        Violation { kind, x_minus: self.generators[m].id.clone(), x_plus: self.generators[p].id.clone() }
    }
}

/// `d^2 = 0`, and every entry lowers degree by one and strictly lowers action.
pub fn validate_complex(c: &FilteredZ2Complex) -> ValidationReport {
    let mut violations = Vec::new();
    for (m, p) in c.differential.entries() {
        let (gm, gp) = (&c.generators[m], &c.generators[p]);
        if gm.degree != gp.degree - 1 {
            violations.push(c.violation(ViolationKind::Degree, m, p));
        }
        if !(gm.action < gp.action) {
            violations.push(c.violation(ViolationKind::Action, m, p));
        }
    }
    let d2 = c.differential.mul(&c.differential).expect("square");
    violations.extend(d2.entries().map(|(m, p)| c.violation(ViolationKind::DSquared, m, p)));
    ValidationReport { pass: violations.is_empty(), violations }
}

/// `dim ker d_k - rank d_{k+1}` for every degree carrying a generator.
pub fn homology(c: &FilteredZ2Complex) -> BTreeMap<i64, usize> {
    let rank_from = |k: i64| c.differential.select(&c.in_degree(k - 1), &c.in_degree(k)).rank();
    c.degrees().into_iter().map(|k| (k, c.in_degree(k).len() - rank_from(k) - rank_from(k + 1))).collect()
}

/// Total homology dimension.
pub fn total_dim(h: &BTreeMap<i64, usize>) -> usize {
    h.values().sum()
}

/// The quotient of `{action <= b}` by `{action <= a}`: generators with action in `(a, b]` and
/// the restricted differential.
pub fn filtration_subquotient(c: &FilteredZ2Complex, a: f64, b: f64) -> Result<FilteredZ2Complex> {
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("window ({a}, {b}] is empty")));
    }
    let keep: Vec<usize> =
        (0..c.len()).filter(|&i| c.generators[i].action > a && c.generators[i].action <= b).collect();
    FilteredZ2Complex::new(keep.iter().map(|&i| c.generators[i].clone()).collect(), c.differential.select(&keep, &keep))
}

/// `matrix[target][source]`, degree preserving, commuting with the differentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMap {
    pub source: FilteredZ2Complex,
    pub target: FilteredZ2Complex,
    pub matrix: Z2Matrix,
    /// A monotone continuation map does not increase action.
    #[serde(default)]
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMapReport {
    pub pass: bool,
    pub degree_violations: Vec<(String, String)>,
    pub action_violations: Vec<(String, String)>,
    /// Entries of `d Phi + Phi d`.
    pub commutator: Vec<(String, String)>,
}

impl ChainMap {
    pub fn new(source: FilteredZ2Complex, target: FilteredZ2Complex, matrix: Z2Matrix, monotone: bool) -> Result<Self> {
        if matrix.nrows() != target.len() || matrix.ncols() != source.len() {
            return Err(Error::Shape(format!(
                "chain map matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                target.len(),
                source.len()
            )));
        }
        Ok(Self { source, target, matrix, monotone })
    }

    pub fn identity(c: &FilteredZ2Complex) -> Self {
        Self { source: c.clone(), target: c.clone(), matrix: Z2Matrix::identity(c.len()), monotone: true }
    }

    pub fn validate(&self) -> ChainMapReport {
        let (s, t) = (&self.source.generators, &self.target.generators);
        let mut degree_violations = Vec::new();
        let mut action_violations = Vec::new();
        for (i, j) in self.matrix.entries() {
            if t[i].degree != s[j].degree {
                degree_violations.push((t[i].id.clone(), s[j].id.clone()));
            }
            if self.monotone && t[i].action > s[j].action {
                action_violations.push((t[i].id.clone(), s[j].id.clone()));
            }
        }
        let lhs = self.target.differential.mul(&self.matrix).expect("shapes checked");
        let rhs = self.matrix.mul(&self.source.differential).expect("shapes checked");
        let commutator: Vec<_> =
            lhs.add(&rhs).expect("same shape").entries().map(|(i, j)| (t[i].id.clone(), s[j].id.clone())).collect();
        ChainMapReport {
            pass: degree_violations.is_empty() && action_violations.is_empty() && commutator.is_empty(),
            degree_violations,
            action_violations,
            commutator,
        }
    }

    /// `other . self`; monotone when both are.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.target.len() != other.source.len() {
            return Err(Error::Shape("composed chain maps do not match".into()));
        }
        Ok(ChainMap {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: other.matrix.mul(&self.matrix)?,
            monotone: self.monotone && other.monotone,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareReport {
    pub commutes: bool,
    /// Entries of `Psi_next Phi_M + Phi_handle Psi_i`.
    pub defect: Vec<(usize, usize)>,
}

/// Checks `psi_next . phi_m = phi_handle . psi_i` for the square
/// `psi_i: A -> B`, `phi_m: A -> C`, `phi_handle: B -> D`, `psi_next: C -> D`.
pub fn check_square(
    psi_i: &ChainMap,
    psi_next: &ChainMap,
    phi_m: &ChainMap,
    phi_handle: &ChainMap,
) -> Result<SquareReport> {
    let shape = |m: &ChainMap| (m.matrix.nrows(), m.matrix.ncols());
    let (a, b, c, d) = (psi_i.source.len(), psi_i.target.len(), phi_m.target.len(), phi_handle.target.len());
    if shape(phi_m) != (c, a) || shape(phi_handle) != (d, b) || shape(psi_next) != (d, c) {
        return Err(Error::Shape(format!(
            "square does not close: psi_i {:?}, phi_m {:?}, phi_handle {:?}, psi_next {:?}",
            shape(psi_i),
            shape(phi_m),
            shape(phi_handle),
            shape(psi_next)
        )));
    }
    let lhs = psi_next.matrix.mul(&phi_m.matrix)?;
    let rhs = phi_handle.matrix.mul(&psi_i.matrix)?;
    let defect: Vec<_> = lhs.add(&rhs)?.entries().collect();
    Ok(SquareReport { commutes: defect.is_empty(), defect })
}

/// A random valid complex `d = B d0 B^-1`, with `d0` a matching of generator pairs and `B` a
/// filtered unipotent change of basis.
pub fn random_complex<R: Rng>(rng: &mut R, size: usize, degree_range: i64) -> FilteredZ2Complex {
    let mut actions: Vec<f64> = (0..size).map(|i| i as f64 + rng.random_range(0.0..0.5)).collect();
    actions.shuffle(rng);
    let gens: Vec<Generator> = (0..size)
        .map(|i| Generator::new(format!("g{i}"), rng.random_range(0..=degree_range.max(0)), actions[i]))
        .collect();
    let mut d0 = Z2Matrix::zeros(size, size);
    let mut free: Vec<usize> = (0..size).collect();
    free.shuffle(rng);
    let mut used = vec![false; size];
    for &p in &free {
        if used[p] || rng.random_bool(0.3) {
            continue;
        }
        let partner = free
            .iter()
            .copied()
            .find(|&m| !used[m] && m != p && gens[m].degree == gens[p].degree - 1 && gens[m].action < gens[p].action);
        if let Some(m) = partner {
            used[m] = true;
            used[p] = true;
            d0.toggle(m, p);
        }
    }
    // B[i][j] may be 1 for i != j only within a degree and with action_i < action_j
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&i, &j| gens[i].action.total_cmp(&gens[j].action));
    let mut b = Z2Matrix::identity(size);
    for (x, &j) in order.iter().enumerate() {
        for &i in &order[..x] {
            if gens[i].degree == gens[j].degree && rng.random_bool(0.3) {
                b.toggle(i, j);
            }
        }
    }
    let b_inv = unipotent_inverse(&b, &order);
    let d = b.mul(&d0).and_then(|m| m.mul(&b_inv)).expect("square");
    FilteredZ2Complex::new(gens, d).expect("valid by construction")
}

/// Inverse of `I + N` with `N` strictly upper triangular in `order`.
fn unipotent_inverse(b: &Z2Matrix, order: &[usize]) -> Z2Matrix {
    let n = b.nrows();
    let mut inv = Z2Matrix::identity(n);
    // solve column by column: x_j = e_j + sum_{i before j} N[i][j] x_i  applied in order
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &j in order {
        let mut acc = vec![j];
        for &i in b.column(j) {
            if i != j {
                acc = xor(&acc, &cols[i]);
            }
        }
        cols[j] = acc;
    }
    for (j, col) in cols.iter().enumerate() {
        for &i in col {
            if i != j {
                inv.toggle(i, j);
            }
        }
    }
    inv
}

fn xor(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    let mut out = Vec::new();
    let mut k = 0;
    while k < v.len() {
        if k + 1 < v.len() && v[k] == v[k + 1] {
            k += 2;
        } else {
            out.push(v[k]);
            k += 1;
        }
    }
    out
}

/// What a mutation broke.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mutation {
    pub kind: ViolationKind,
    pub x_minus: String,
    pub x_plus: String,
}

/// Corrupts a valid complex with one seeded change: an entry of the wrong degree, an entry that
/// raises action, or an admissible entry (adding a generator if needed) that makes `d^2 != 0`.
pub fn mutate<R: Rng>(rng: &mut R, c: &FilteredZ2Complex) -> (FilteredZ2Complex, Mutation) {
    let mut gens = c.generators.clone();
    let top = gens.iter().map(|g| g.action).fold(0.0f64, f64::max);
    let kind = [ViolationKind::DSquared, ViolationKind::Degree, ViolationKind::Action][rng.random_range(0..3)];
    let fresh = |gens: &Vec<Generator>, tag: &str| format!("{tag}{}", gens.len());
    let (m, p) = match kind {
        ViolationKind::Degree => {
            // same degree, lower action: a degree violation only
            gens.push(Generator::new(fresh(&gens, "m"), 0, top + 1.0));
            gens.push(Generator::new(fresh(&gens, "m"), 0, top + 2.0));
            (gens.len() - 2, gens.len() - 1)
        }
        ViolationKind::Action => {
            gens.push(Generator::new(fresh(&gens, "m"), 0, top + 2.0));
            gens.push(Generator::new(fresh(&gens, "m"), 1, top + 1.0));
            (gens.len() - 2, gens.len() - 1)
        }
        ViolationKind::DSquared => {
            let hit: Vec<usize> = (0..c.len()).filter(|&u| !c.differential.column(u).is_empty()).collect();
            let u = if hit.is_empty() {
                gens.push(Generator::new(fresh(&gens, "m"), 0, top + 1.0));
                gens.push(Generator::new(fresh(&gens, "m"), 1, top + 2.0));
                let u = gens.len() - 1;
                (u, Some(u - 1))
            } else {
                (hit[rng.random_range(0..hit.len())], None)
            };
            let (u, extra) = u;
            gens.push(Generator::new(fresh(&gens, "m"), gens[u].degree + 1, top + 10.0));
            let p = gens.len() - 1;
            let n = gens.len();
            let mut d = Z2Matrix::zeros(n, n);
            for (i, j) in c.differential.entries() {
                d.toggle(i, j);
            }
            if let Some(v) = extra {
                d.toggle(v, u);
            }
            d.toggle(u, p);
            let out = FilteredZ2Complex::new(gens, d).expect("fresh ids");
            let mutation =
                Mutation { kind, x_minus: out.generators[u].id.clone(), x_plus: out.generators[p].id.clone() };
            return (out, mutation);
        }
    };
    let n = gens.len();
    let mut d = Z2Matrix::zeros(n, n);
    for (i, j) in c.differential.entries() {
        d.toggle(i, j);
    }
    d.toggle(m, p);
    let out = FilteredZ2Complex::new(gens, d).expect("fresh ids");
    let mutation = Mutation { kind, x_minus: out.generators[m].id.clone(), x_plus: out.generators[p].id.clone() };
    (out, mutation)
}
