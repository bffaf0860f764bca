use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::json;
use wrapfloer::handle::{
    liouville_flow, potentials, quadratic_model_flow, transversality_certificate, GridSpec, HandleParams, HandlePoint,
};
use wrapfloer::maslov::{self, HalfInt};
use wrapfloer::spectrum::{
    self, handle_rs_index, handle_rs_index_corrected, perturbation_cluster_bounds, CoefficientProfile,
};
use wrapfloer::symplin::LagrangianPath;
use wrapfloer::verify::quadratic_chord_index;

use crate::io::{input_error, num, parse_input, read_json, CliResult, Output, Table};
use crate::Ctx;

#[derive(Debug, Clone, Copy, Args)]
pub struct HandleArgs {
    /// Half-dimension of the ambient space
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Handle index, 1 <= k < n
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
}

impl HandleArgs {
    fn params(&self) -> CliResult<HandleParams> {
        Ok(HandleParams::new(self.n, self.k, self.epsilon, self.delta)?)
    }
}

#[derive(Deserialize)]
struct PathPair {
    l0: LagrangianPath,
    l1: LagrangianPath,
}

pub fn rs_index(ctx: &Ctx) -> CliResult<Output> {
    let p: PathPair = parse_input(ctx.input(), "{\"l0\": path, \"l1\": path}")?;
    let index = maslov::rs_index(&p.l0, &p.l1)?;
    let crossings = maslov::pair_crossings(&p.l0, &p.l1)?;
    let mut t = Table::new(&["time", "intersection_dim", "signature", "contribution_halves", "boundary"]);
    for c in &crossings {
        t.push(vec![
            num(c.time),
            c.intersection_dim.to_string(),
            c.crossing_form_signature.to_string(),
            c.contribution().halves.to_string(),
            c.boundary.to_string(),
        ]);
    }
    Ok(Output::new(json!({"halves": index.halves, "crossings": crossings}))?.with_table(t))
}

pub fn det2_winding(ctx: &Ctx) -> CliResult<Output> {
    let p: LagrangianPath = parse_input(ctx.input(), "a Lagrangian path")?;
    Output::new(json!({"winding": maslov::det2_winding(&p)?}))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChordModel {
    /// `t -> e^{i(k + 1/2) pi t} R^n` against `R^n`
    Quadratic,
}

#[derive(Debug, Clone, Args)]
pub struct ChordMaslovArgs {
    #[arg(long, value_enum)]
    pub model: Option<ChordModel>,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
}

#[derive(Deserialize)]
struct ChordInput {
    flow_path: LagrangianPath,
    reference: LagrangianPath,
    n: usize,
}

pub fn chord_maslov(args: &ChordMaslovArgs, ctx: &Ctx) -> CliResult<Output> {
    let mu: HalfInt = match args.model {
        Some(ChordModel::Quadratic) => quadratic_chord_index(args.n, args.k)?,
        None => {
            let c: ChordInput = parse_input(ctx.input(), "{\"flow_path\", \"reference\", \"n\"}")?;
            maslov::chord_maslov(&c.flow_path, &c.reference, c.n)?
        }
    };
    Output::new(json!({"halves": mu.halves}))
}

#[derive(Debug, Clone, Args)]
pub struct HandleCertifyArgs {
    #[command(flatten)]
    pub handle: HandleArgs,
    /// Lattice points per side on each coordinate plane
    #[arg(long, default_value_t = 50)]
    pub resolution: usize,
}

pub fn handle_certify(args: &HandleCertifyArgs) -> CliResult<Output> {
    let p = args.handle.params()?;
    let cert = transversality_certificate(&p, &GridSpec::default_for(&p, args.resolution))?;
    let pass = cert.pass;
    Ok(Output::new(cert)?.with_pass(pass))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlowModel {
    Liouville,
    /// `z -> e^{i(k + 1/2) pi t} z` on pairs `(c1 + i c2, c3 + i c4, ..)`
    Quadratic,
}

#[derive(Debug, Clone, Args)]
pub struct HandleFlowArgs {
    #[command(flatten)]
    pub handle: HandleArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    /// Start point as comma-separated coordinates; otherwise read {"coords": [..]} from the input
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Vec<f64>,
    /// Number of equal time steps reported
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = FlowModel::Liouville)]
    pub model: FlowModel,
}

pub fn handle_flow(args: &HandleFlowArgs, ctx: &Ctx) -> CliResult<Output> {
    let start = if args.point.is_empty() {
        parse_input::<HandlePoint>(ctx.input(), "{\"coords\": [..]}")?
    } else {
        HandlePoint::new(args.point.clone())
    };
    if start.coords.is_empty() || start.coords.len() % 2 != 0 {
        return Err(input_error("a point needs an even, positive number of coordinates"));
    }
    let steps = args.steps.max(1);
    let times: Vec<f64> = (0..=steps).map(|i| args.t * i as f64 / steps as f64).collect();
    let dim = start.coords.len();
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((1..=dim).map(|i| format!("c{i}")));
    let mut table = Table { header, rows: vec![] };
    let mut samples = Vec::new();
    match args.model {
        FlowModel::Liouville => {
            let p = args.handle.params()?;
            table.header.extend(["phi".to_string(), "psi_delta".to_string()]);
            for &t in &times {
                let q = liouville_flow(&start, t, &p)?;
                let pot = potentials(&q, &p)?;
                let mut row = vec![num(t)];
                row.extend(q.coords.iter().map(|&c| num(c)));
                row.extend([num(pot.phi), num(pot.psi_delta)]);
                table.push(row);
                samples.push(json!({"t": t, "coords": q.coords, "potentials": pot}));
            }
        }
        FlowModel::Quadratic => {
            let k = u32::try_from(args.handle.k).map_err(|_| input_error("k too large"))?;
            let z0: Vec<Complex64> = start.coords.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
            for &t in &times {
                let coords: Vec<f64> = quadratic_model_flow(&z0, k, t).iter().flat_map(|z| [z.re, z.im]).collect();
                let mut row = vec![num(t)];
                row.extend(coords.iter().map(|&c| num(c)));
                table.push(row);
                samples.push(json!({"t": t, "coords": coords}));
            }
        }
    }
    let model = match args.model {
        FlowModel::Liouville => "liouville",
        FlowModel::Quadratic => "quadratic",
    };
    Ok(Output::new(json!({"model": model, "samples": samples}))?.with_table(table))
}

#[derive(Debug, Clone, Args)]
pub struct ChordLevelsArgs {
    #[command(flatten)]
    pub handle: HandleArgs,
    /// Slope of the Hamiltonian
    #[arg(long)]
    pub a: f64,
    /// Highest level searched [default: end of the C_z table]
    #[arg(long)]
    pub z_max: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub cx: f64,
    #[arg(long, default_value_t = 1.0)]
    pub cy: f64,
}

pub fn chord_levels(args: &ChordLevelsArgs, ctx: &Ctx) -> CliResult<Output> {
    let prof = match ctx.input() {
        Some(arg) => {
            let p: CoefficientProfile = serde_json::from_value(read_json(arg)?)
                .map_err(|e| input_error(format!("bad coefficient profile: {e}")))?;
            p.validate()?;
            p
        }
        None => CoefficientProfile::handle_model(&args.handle.params()?, args.cx, args.cy, 65)?,
    };
    let z_max = args.z_max.unwrap_or(prof.z_range().1);
    let chords = spectrum::chord_levels(args.a, &prof, z_max)?;
    let mut t = Table::new(&["z_level", "m", "is_constant"]);
    for c in &chords {
        t.push(vec![num(c.z_level), c.m.map_or(String::new(), |m| m.to_string()), c.is_constant.to_string()]);
    }
    Ok(Output::new(json!({"a": args.a, "z_max": z_max, "chords": chords}))?.with_table(t))
}

#[derive(Debug, Clone, Args)]
pub struct HandleIndexArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// The product a * C_z at the chord level; must lie in 2 pi Z
    #[arg(long = "aCz", allow_hyphen_values = true)]
    pub a_cz: f64,
}

pub fn handle_index(args: &HandleIndexArgs) -> CliResult<Output> {
    let closed = handle_rs_index(args.n, args.k, args.a_cz, 1.0)?;
    let crossing_form = handle_rs_index_corrected(args.n, args.k, args.a_cz, 1.0)?;
    Output::new(json!({"halves": closed.halves, "crossing_form": crossing_form}))
}

pub fn cluster_bounds(args: &HandleIndexArgs) -> CliResult<Output> {
    let b = perturbation_cluster_bounds(args.n, args.k, args.a_cz, 1.0)?;
    let mut t = Table::new(&["cluster", "lo_halves", "hi_halves"]);
    for (name, i) in [("first", b.first), ("second", b.second)] {
        t.push(vec![name.into(), i.lo.halves.to_string(), i.hi.halves.to_string()]);
    }
    Ok(Output::new(b)?.with_table(t))
}
