use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::frame::direct_sum_frames;
use super::{complex_structure, is_symplectic, LagrangianFrame, Mat, BILINEAR_TOL};
use crate::error::{Error, Result};

const DEFAULT_RESOLUTION: usize = 512;

/// A continuous path of Lagrangian frames over a closed interval.
pub trait FramePath: Send + Sync {
    fn n(&self) -> usize;

    fn domain(&self) -> (f64, f64);

    /// A `2n x n` frame spanning the Lagrangian at time `t`. Need not be orthonormal.
    fn frame_at(&self, t: f64) -> Mat;

    /// Minimum number of evaluation points used when scanning the path.
    fn sample_resolution(&self) -> usize {
        DEFAULT_RESOLUTION
    }

    /// Evaluates and validates the frame at `t`.
    fn lagrangian_at(&self, t: f64) -> Result<LagrangianFrame> {
        LagrangianFrame::new(self.frame_at(t))
    }
}

impl<P: FramePath + ?Sized> FramePath for &P {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn frame_at(&self, t: f64) -> Mat {
        (**self).frame_at(t)
    }
    fn sample_resolution(&self) -> usize {
        (**self).sample_resolution()
    }
}

impl<P: FramePath + ?Sized> FramePath for Arc<P> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn frame_at(&self, t: f64) -> Mat {
        (**self).frame_at(t)
    }
    fn sample_resolution(&self) -> usize {
        (**self).sample_resolution()
    }
}

impl<P: FramePath + ?Sized> FramePath for Box<P> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn frame_at(&self, t: f64) -> Mat {
        (**self).frame_at(t)
    }
    fn sample_resolution(&self) -> usize {
        (**self).sample_resolution()
    }
}

fn check_domain(domain: (f64, f64)) -> Result<()> {
    if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
        return Err(Error::InvalidParameter(format!("bad domain [{}, {}]", domain.0, domain.1)));
    }
    Ok(())
}

/// A real scalar function of time used to scale a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// `sum c_j t^j`
    Polynomial(Vec<f64>),
    /// `amplitude * sin(2 pi frequency t + phase)`
    Sine { amplitude: f64, frequency: f64, phase: f64 },
}

impl Schedule {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Schedule::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &a| acc * t + a),
            Schedule::Sine { amplitude, frequency, phase } => {
                amplitude * (2.0 * std::f64::consts::PI * frequency * t + phase).sin()
            }
        }
    }

    /// `c * t`.
    pub fn linear(c: f64) -> Self {
        Schedule::Polynomial(vec![0.0, c])
    }
}

/// One factor of a symplectic matrix path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorSpec {
    Constant(#[serde(with = "mat_rows")] Mat),
    /// `exp(schedule(t) J S)` with `S` symmetric.
    Exponential {
        #[serde(with = "mat_rows")]
        generator: Mat,
        schedule: Schedule,
    },
}

impl FactorSpec {
    fn dim(&self) -> usize {
        match self {
            FactorSpec::Constant(m) => m.nrows(),
            FactorSpec::Exponential { generator, .. } => generator.nrows(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            FactorSpec::Constant(m) => {
                if !is_symplectic(m)? {
                    return Err(Error::InvalidParameter("constant factor is not symplectic".into()));
                }
            }
            FactorSpec::Exponential { generator, .. } => {
                let d = generator.nrows();
                if d == 0 || d % 2 != 0 || generator.ncols() != d {
                    return Err(Error::Dimension(format!("generator is {}x{}", d, generator.ncols())));
                }
                let asym = (generator - generator.transpose()).amax();
                if asym > BILINEAR_TOL * (1.0 + generator.amax()) {
                    return Err(Error::InvalidParameter("generator must be symmetric".into()));
                }
            }
        }
        Ok(())
    }

    pub fn matrix_at(&self, t: f64) -> Mat {
        match self {
            FactorSpec::Constant(m) => m.clone(),
            FactorSpec::Exponential { generator, schedule } => {
                let s = schedule.eval(t);
                if s == 0.0 {
                    return Mat::identity(generator.nrows(), generator.nrows());
                }
                (complex_structure(generator.nrows() / 2) * generator * s).exp()
            }
        }
    }
}

/// Product of factors at `t`, left to right.
pub(crate) fn factor_product(factors: &[FactorSpec], dim: usize, t: f64) -> Mat {
    factors.iter().fold(Mat::identity(dim, dim), |acc, f| acc * f.matrix_at(t))
}

/// `t -> F_1(t) ... F_m(t) L_0` for symplectic factors `F_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorRaw", into = "GeneratorRaw")]
pub struct GeneratorPath {
    initial: LagrangianFrame,
    factors: Vec<FactorSpec>,
    domain: (f64, f64),
    resolution: usize,
}

#[derive(Serialize, Deserialize)]
struct GeneratorRaw {
    n: usize,
    #[serde(default = "unit_domain")]
    domain: (f64, f64),
    initial: LagrangianFrame,
    factors: Vec<FactorSpec>,
    #[serde(default = "default_resolution")]
    sample_resolution: usize,
}

fn unit_domain() -> (f64, f64) {
    (0.0, 1.0)
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

impl TryFrom<GeneratorRaw> for GeneratorPath {
    type Error = Error;
    fn try_from(raw: GeneratorRaw) -> Result<Self> {
        if raw.initial.n() != raw.n {
            return Err(Error::Dimension(format!("n = {} but initial frame has n = {}", raw.n, raw.initial.n())));
        }
        GeneratorPath::new(raw.initial, raw.factors, raw.domain).map(|p| p.with_resolution(raw.sample_resolution))
    }
}

impl From<GeneratorPath> for GeneratorRaw {
    fn from(p: GeneratorPath) -> Self {
        GeneratorRaw {
            n: p.initial.n(),
            domain: p.domain,
            initial: p.initial,
            factors: p.factors,
            sample_resolution: p.resolution,
        }
    }
}

impl GeneratorPath {
    pub fn new(initial: LagrangianFrame, factors: Vec<FactorSpec>, domain: (f64, f64)) -> Result<Self> {
        check_domain(domain)?;
        let dim = 2 * initial.n();
        for f in &factors {
            if f.dim() != dim {
                return Err(Error::Dimension(format!("factor of size {} acting on R^{}", f.dim(), dim)));
            }
            f.validate()?;
        }
        Ok(Self { initial, factors, domain, resolution: DEFAULT_RESOLUTION })
    }

    /// `t -> exp(schedule(t) J S) L_0`.
    pub fn hamiltonian(
        initial: LagrangianFrame,
        generator: Mat,
        schedule: Schedule,
        domain: (f64, f64),
    ) -> Result<Self> {
        Self::new(initial, vec![FactorSpec::Exponential { generator, schedule }], domain)
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution.max(8);
        self
    }

    pub fn initial(&self) -> &LagrangianFrame {
        &self.initial
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    /// The symplectic matrix `F_1(t) ... F_m(t)`.
    pub fn matrix_at(&self, t: f64) -> Mat {
        factor_product(&self.factors, 2 * self.initial.n(), t)
    }
}

impl FramePath for GeneratorPath {
    fn n(&self) -> usize {
        self.initial.n()
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
    fn frame_at(&self, t: f64) -> Mat {
        self.matrix_at(t) * self.initial.columns()
    }
    fn sample_resolution(&self) -> usize {
        self.resolution
    }
}

/// Piecewise-linear interpolation of unitary frames, projected back to `U(n)`.
///
/// Consecutive samples are aligned by an orthogonal change of basis before
/// interpolation, so the path only depends on the sampled subspaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SamplesRaw", into = "SamplesRaw")]
pub struct SampledPath {
    n: usize,
    times: Vec<f64>,
    frames: Vec<LagrangianFrame>,
    unitaries: Vec<DMatrix<Complex64>>,
    resolution: usize,
}

#[derive(Serialize, Deserialize)]
struct SamplesRaw {
    n: usize,
    times: Vec<f64>,
    frames: Vec<LagrangianFrame>,
    #[serde(default = "default_resolution")]
    sample_resolution: usize,
}

impl TryFrom<SamplesRaw> for SampledPath {
    type Error = Error;
    fn try_from(raw: SamplesRaw) -> Result<Self> {
        if raw.frames.iter().any(|f| f.n() != raw.n) {
            return Err(Error::Dimension(format!("all sample frames must have n = {}", raw.n)));
        }
        SampledPath::new(raw.times, raw.frames).map(|p| p.with_resolution(raw.sample_resolution))
    }
}

impl From<SampledPath> for SamplesRaw {
    fn from(p: SampledPath) -> Self {
        SamplesRaw { n: p.n, times: p.times, frames: p.frames, sample_resolution: p.resolution }
    }
}

impl SampledPath {
    pub fn new(times: Vec<f64>, frames: Vec<LagrangianFrame>) -> Result<Self> {
        if times.len() != frames.len() || times.len() < 2 {
            return Err(Error::Shape(format!("{} times for {} frames (need at least 2)", times.len(), frames.len())));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("sample times must be finite and strictly increasing".into()));
        }
        let n = frames[0].n();
        if frames.iter().any(|f| f.n() != n) {
            return Err(Error::Dimension("sample frames differ in n".into()));
        }
        let mut unitaries: Vec<DMatrix<Complex64>> = Vec::with_capacity(frames.len());
        for f in &frames {
            let u = f.unitary();
            let aligned = match unitaries.last() {
                None => u,
                Some(prev) => {
                    // best O(n) change of basis: polar factor of Re(U^H U_prev)
                    let c = (u.adjoint() * prev).map(|z| z.re);
                    let svd = c.svd(true, true);
                    let r = svd.u.unwrap() * svd.v_t.unwrap();
                    u * r.map(|x| Complex64::new(x, 0.0))
                }
            };
            unitaries.push(aligned);
        }
        let resolution = DEFAULT_RESOLUTION.max(8 * times.len());
        Ok(Self { n, times, frames, unitaries, resolution })
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution.max(8);
        self
    }

    /// Samples `path` at `count` equally spaced times.
    pub fn from_path<P: FramePath + ?Sized>(path: &P, count: usize) -> Result<Self> {
        let (a, b) = path.domain();
        let count = count.max(2);
        let times: Vec<f64> = (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect();
        let frames = times.iter().map(|&t| path.lagrangian_at(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, frames)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

fn unitary_polar(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let svd = u.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

fn frame_of_unitary(u: &DMatrix<Complex64>) -> Mat {
    let n = u.nrows();
    Mat::from_fn(2 * n, n, |r, c| if r < n { u[(r, c)].re } else { u[(r - n, c)].im })
}

impl FramePath for SampledPath {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }
    fn frame_at(&self, t: f64) -> Mat {
        let t = t.clamp(self.times[0], *self.times.last().unwrap());
        let i = match self.times.partition_point(|&s| s <= t) {
            0 => 0,
            p => (p - 1).min(self.times.len() - 2),
        };
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let s = (t - t0) / (t1 - t0);
        if s <= 0.0 {
            return frame_of_unitary(&self.unitaries[i]);
        }
        if s >= 1.0 {
            return frame_of_unitary(&self.unitaries[i + 1]);
        }
        let mix = &self.unitaries[i] * Complex64::new(1.0 - s, 0.0) + &self.unitaries[i + 1] * Complex64::new(s, 0.0);
        frame_of_unitary(&unitary_polar(&mix))
    }
    fn sample_resolution(&self) -> usize {
        self.resolution
    }
}

type FrameFn = dyn Fn(f64) -> Mat + Send + Sync;

/// A path given by an arbitrary closure.
#[derive(Clone)]
pub struct FnPath {
    n: usize,
    domain: (f64, f64),
    f: Arc<FrameFn>,
    resolution: usize,
}

impl FnPath {
    pub fn new(n: usize, domain: (f64, f64), f: impl Fn(f64) -> Mat + Send + Sync + 'static) -> Result<Self> {
        check_domain(domain)?;
        Ok(Self { n, domain, f: Arc::new(f), resolution: DEFAULT_RESOLUTION })
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution.max(8);
        self
    }
}

impl fmt::Debug for FnPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnPath").field("n", &self.n).field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl FramePath for FnPath {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
    fn frame_at(&self, t: f64) -> Mat {
        (self.f)(t)
    }
    fn sample_resolution(&self) -> usize {
        self.resolution
    }
}

/// The constant path at a fixed Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantPath {
    frame: LagrangianFrame,
    domain: (f64, f64),
}

impl ConstantPath {
    pub fn new(frame: LagrangianFrame, domain: (f64, f64)) -> Self {
        Self { frame, domain }
    }

    pub fn unit(frame: LagrangianFrame) -> Self {
        Self::new(frame, (0.0, 1.0))
    }
}

impl FramePath for ConstantPath {
    fn n(&self) -> usize {
        self.frame.n()
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
    fn frame_at(&self, _t: f64) -> Mat {
        self.frame.columns().clone()
    }
    fn sample_resolution(&self) -> usize {
        8
    }
}

/// Restriction of a path to a subinterval of its domain.
#[derive(Debug, Clone)]
pub struct Restricted<P> {
    inner: P,
    domain: (f64, f64),
}

impl<P: FramePath> Restricted<P> {
    pub fn new(inner: P, a: f64, b: f64) -> Result<Self> {
        let (lo, hi) = inner.domain();
        check_domain((a, b))?;
        if a < lo || b > hi {
            return Err(Error::InvalidParameter(format!("[{a}, {b}] is not inside [{lo}, {hi}]")));
        }
        Ok(Self { inner, domain: (a, b) })
    }
}

impl<P: FramePath> FramePath for Restricted<P> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
    fn frame_at(&self, t: f64) -> Mat {
        self.inner.frame_at(t)
    }
    fn sample_resolution(&self) -> usize {
        self.inner.sample_resolution()
    }
}

/// `t -> P(phi(t))` for a time change `phi` mapping the new domain into the old one.
#[derive(Clone)]
pub struct Reparametrized<P> {
    inner: P,
    domain: (f64, f64),
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl<P: FramePath> Reparametrized<P> {
    pub fn new(inner: P, domain: (f64, f64), phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_domain(domain)?;
        Ok(Self { inner, domain, phi: Arc::new(phi) })
    }
}

impl<P: FramePath> FramePath for Reparametrized<P> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
    fn frame_at(&self, t: f64) -> Mat {
        self.inner.frame_at((self.phi)(t))
    }
    fn sample_resolution(&self) -> usize {
        self.inner.sample_resolution()
    }
}

/// `t -> A(t) (+) B(t)` in `R^{2(n_A + n_B)}`. Both paths must share the domain.
#[derive(Debug, Clone)]
pub struct DirectSumPath<A, B> {
    a: A,
    b: B,
}

impl<A: FramePath, B: FramePath> DirectSumPath<A, B> {
    pub fn new(a: A, b: B) -> Result<Self> {
        let (da, db) = (a.domain(), b.domain());
        if (da.0 - db.0).abs() > 1e-12 || (da.1 - db.1).abs() > 1e-12 {
            return Err(Error::InvalidParameter("direct sum of paths with different domains".into()));
        }
        Ok(Self { a, b })
    }
}

impl<A: FramePath, B: FramePath> FramePath for DirectSumPath<A, B> {
    fn n(&self) -> usize {
        self.a.n() + self.b.n()
    }
    fn domain(&self) -> (f64, f64) {
        self.a.domain()
    }
    fn frame_at(&self, t: f64) -> Mat {
        direct_sum_frames(&self.a.frame_at(t), &self.b.frame_at(t))
    }
    fn sample_resolution(&self) -> usize {
        self.a.sample_resolution().max(self.b.sample_resolution())
    }
}

/// `t -> Psi(t) P(t)` for a symplectic matrix path `Psi` given by factors.
#[derive(Debug, Clone)]
pub struct TransformedPath<P> {
    inner: P,
    psi: Vec<FactorSpec>,
}

impl<P: FramePath> TransformedPath<P> {
    pub fn new(inner: P, psi: Vec<FactorSpec>) -> Result<Self> {
        let dim = 2 * inner.n();
        for f in &psi {
            if f.dim() != dim {
                return Err(Error::Dimension(format!("factor of size {} acting on R^{}", f.dim(), dim)));
            }
            f.validate()?;
        }
        Ok(Self { inner, psi })
    }
}

impl<P: FramePath> FramePath for TransformedPath<P> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }
    fn frame_at(&self, t: f64) -> Mat {
        factor_product(&self.psi, 2 * self.inner.n(), t) * self.inner.frame_at(t)
    }
    fn sample_resolution(&self) -> usize {
        self.inner.sample_resolution()
    }
}

/// Serializable path: `{"kind": "generator" | "samples", "n": .., ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LagrangianPath {
    Generator(GeneratorPath),
    Samples(SampledPath),
}

impl From<GeneratorPath> for LagrangianPath {
    fn from(p: GeneratorPath) -> Self {
        LagrangianPath::Generator(p)
    }
}

impl From<SampledPath> for LagrangianPath {
    fn from(p: SampledPath) -> Self {
        LagrangianPath::Samples(p)
    }
}

impl LagrangianPath {
    fn inner(&self) -> &dyn FramePath {
        match self {
            LagrangianPath::Generator(p) => p,
            LagrangianPath::Samples(p) => p,
        }
    }

    /// The constant path at `frame` over `[0, 1]`.
    pub fn constant(frame: LagrangianFrame) -> Self {
        LagrangianPath::Generator(GeneratorPath::new(frame, Vec::new(), (0.0, 1.0)).expect("unit domain is valid"))
    }
}

impl FramePath for LagrangianPath {
    fn n(&self) -> usize {
        self.inner().n()
    }
    fn domain(&self) -> (f64, f64) {
        self.inner().domain()
    }
    fn frame_at(&self, t: f64) -> Mat {
        self.inner().frame_at(t)
    }
    fn sample_resolution(&self) -> usize {
        self.inner().sample_resolution()
    }
}

/// Matrices as JSON arrays of rows.
pub(crate) mod mat_rows {
    use super::Mat;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Mat, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != nc) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(Mat::from_fn(nr, nc, |i, j| rows[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::lagrangian_intersection_dim;
    use std::f64::consts::PI;

    fn rotation(n: usize, c: f64) -> GeneratorPath {
        GeneratorPath::hamiltonian(
            LagrangianFrame::horizontal(n),
            Mat::identity(2 * n, 2 * n),
            Schedule::linear(c),
            (0.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn identity_generator_rotates_by_i() {
        // exp(t J) is multiplication by e^{it}
        let p = rotation(1, PI / 2.0);
        let f = p.lagrangian_at(1.0).unwrap();
        assert!(f.same_subspace(&LagrangianFrame::vertical(1)).unwrap());
        let f = p.lagrangian_at(0.5).unwrap();
        assert!(f.same_subspace(&LagrangianFrame::rotated(&[PI / 4.0])).unwrap());
    }

    #[test]
    fn schedules() {
        assert_eq!(Schedule::Polynomial(vec![1.0, 2.0, 3.0]).eval(2.0), 17.0);
        let s = Schedule::Sine { amplitude: 2.0, frequency: 1.0, phase: 0.0 };
        assert!((s.eval(0.25) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn non_symplectic_factor_rejected() {
        let bad = FactorSpec::Constant(Mat::identity(2, 2) * 2.0);
        assert!(GeneratorPath::new(LagrangianFrame::horizontal(1), vec![bad], (0.0, 1.0)).is_err());
        let asym = FactorSpec::Exponential {
            generator: Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
            schedule: Schedule::linear(1.0),
        };
        assert!(GeneratorPath::new(LagrangianFrame::horizontal(1), vec![asym], (0.0, 1.0)).is_err());
    }

    #[test]
    fn sampled_path_hits_samples_and_stays_lagrangian() {
        let p = rotation(2, 1.3);
        let s = SampledPath::from_path(&p, 33).unwrap();
        for &t in s.times() {
            let a = LagrangianFrame::new(s.frame_at(t)).unwrap();
            let b = p.lagrangian_at(t).unwrap();
            assert_eq!(lagrangian_intersection_dim(&a, &b).unwrap(), 2);
        }
        for i in 0..100 {
            s.lagrangian_at(i as f64 / 99.0).unwrap();
        }
    }

    #[test]
    fn sampled_path_survives_basis_flips() {
        let times = vec![0.0, 0.5, 1.0];
        let frames = vec![
            LagrangianFrame::horizontal(1),
            LagrangianFrame::new(LagrangianFrame::rotated(&[0.3]).columns() * -2.0).unwrap(),
            LagrangianFrame::rotated(&[0.6]),
        ];
        let s = SampledPath::new(times, frames).unwrap();
        let mid = s.lagrangian_at(0.25).unwrap();
        assert!(mid.same_subspace(&LagrangianFrame::rotated(&[0.15])).unwrap());
    }

    #[test]
    fn direct_sum_orders_coordinates() {
        let p = DirectSumPath::new(
            ConstantPath::unit(LagrangianFrame::horizontal(1)),
            ConstantPath::unit(LagrangianFrame::vertical(1)),
        )
        .unwrap();
        let expected =
            LagrangianFrame::new(Mat::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert!(p.lagrangian_at(0.3).unwrap().same_subspace(&expected).unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let p: LagrangianPath = rotation(2, 0.7).into();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains(r#""kind":"generator""#));
        let back: LagrangianPath = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);

        let q: LagrangianPath = SampledPath::from_path(&rotation(1, 0.7), 5).unwrap().into();
        let s = serde_json::to_string(&q).unwrap();
        let back: LagrangianPath = serde_json::from_str(&s).unwrap();
        assert!((back.frame_at(0.4) - q.frame_at(0.4)).amax() < 1e-12);
    }

    #[test]
    fn restricted_domain_checked() {
        let p = rotation(1, 1.0);
        assert!(Restricted::new(&p, 0.2, 0.6).is_ok());
        assert!(Restricted::new(&p, -0.2, 0.6).is_err());
    }
}
