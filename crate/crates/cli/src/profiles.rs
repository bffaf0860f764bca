use std::f64::consts::PI;

use clap::Args;
use serde::Deserialize;
use serde_json::json;
use wrapfloer::profiles::{
    build_beta, build_transfer_profile, monotone_homotopy_check, verify_action_signs, verify_monotone, BetaParams,
    RadialProfile, SlopeOptions, SpectrumSet, TransferSchedule,
};

use crate::io::{input_error, num, read_json, CliResult, Output, Table};
use crate::Ctx;

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    /// Reeb chord periods on the inner boundary [default: pi,2pi,3pi]
    #[arg(long, value_delimiter = ',')]
    pub spectrum: Vec<f64>,
    /// Periods on the outer boundary, checked against a/(4C) [default: the inner spectrum]
    #[arg(long, value_delimiter = ',')]
    pub boundary: Vec<f64>,
    /// Radial scale between the collars
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps1: f64,
    #[arg(long, default_value_t = 3)]
    pub stages: usize,
    /// Minimum distance of every slope from the spectrum
    #[arg(long, default_value_t = 1e-3)]
    pub gap: f64,
}

struct Family {
    spectrum: SpectrumSet,
    boundary: Option<SpectrumSet>,
    schedule: TransferSchedule,
}

impl ScheduleArgs {
    fn family(&self) -> CliResult<Family> {
        let values = if self.spectrum.is_empty() { vec![PI, 2.0 * PI, 3.0 * PI] } else { self.spectrum.clone() };
        let spectrum = SpectrumSet::new(values)?;
        let boundary = if self.boundary.is_empty() { None } else { Some(SpectrumSet::new(self.boundary.clone())?) };
        let mut opts = SlopeOptions::new(self.c);
        opts.gap = self.gap;
        opts.boundary = boundary.clone();
        let schedule = TransferSchedule::derive(&spectrum, self.stages, self.eps1, &opts)?;
        Ok(Family { spectrum, boundary, schedule })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProfileBuildArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Stage to build, 1-based
    #[arg(long, default_value_t = 1)]
    pub stage: usize,
    /// Rows in the CSV sample table
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Largest sampled radius [default: 1.25 times the last breakpoint]
    #[arg(long)]
    pub r_max: Option<f64>,
}

pub fn profile_build(args: &ProfileBuildArgs) -> CliResult<Output> {
    let f = args.schedule.family()?;
    let h = build_transfer_profile(args.stage, &f.spectrum, f.boundary.as_ref(), &f.schedule)?;
    let r_max = args.r_max.unwrap_or_else(|| 1.25 * h.breakpoints().last().copied().unwrap_or(1.0));
    let mut t = Table::new(&["r", "h", "dh", "action"]);
    for (r, v, d, act) in h.samples(r_max, args.samples) {
        t.push(vec![num(r), num(v), num(d), num(act)]);
    }
    Ok(Output::new(json!({"profile": h, "schedule": f.schedule}))?.with_table(t))
}

#[derive(Debug, Clone, Args)]
pub struct ProfileVerifyArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Candidate chord radii per blend region
    #[arg(long, default_value_t = 100)]
    pub blend_samples: usize,
    /// Grid points for the monotonicity check
    #[arg(long, default_value_t = 10_000)]
    pub grid: usize,
}

#[derive(Deserialize)]
struct VerifyInput {
    profiles: Vec<RadialProfile>,
    #[serde(default)]
    spectrum: Option<SpectrumSet>,
    #[serde(default)]
    boundary: Option<SpectrumSet>,
}

pub fn profile_verify(args: &ProfileVerifyArgs, ctx: &Ctx) -> CliResult<Output> {
    let input = match ctx.input() {
        Some(arg) => {
            serde_json::from_value(read_json(arg)?).map_err(|e| input_error(format!("bad profile family: {e}")))?
        }
        None => {
            let f = args.schedule.family()?;
            let profiles = (1..=f.schedule.stages())
                .map(|i| build_transfer_profile(i, &f.spectrum, f.boundary.as_ref(), &f.schedule))
                .collect::<Result<Vec<_>, _>>()?;
            VerifyInput { profiles, spectrum: Some(f.spectrum), boundary: f.boundary }
        }
    };
    if input.profiles.is_empty() {
        return Err(input_error("no profiles to verify"));
    }
    let mut t = Table::new(&["check", "stage", "item", "pass", "margin"]);
    let mut actions = Vec::new();
    for h in &input.profiles {
        let rep = verify_action_signs(h, input.spectrum.as_ref(), input.boundary.as_ref(), args.blend_samples)?;
        for it in &rep.items {
            t.push(vec![
                "action_signs".into(),
                rep.index.to_string(),
                it.item.to_string(),
                it.pass.to_string(),
                num(it.margin),
            ]);
        }
        actions.push(rep);
    }
    let mut monotone = Vec::new();
    for (i, w) in input.profiles.windows(2).enumerate() {
        let rep = verify_monotone(&w[0], &w[1], args.grid)?;
        t.push(vec![
            "monotone".into(),
            format!("{}-{}", i + 1, i + 2),
            String::new(),
            rep.pass.to_string(),
            num(rep.min_gap),
        ]);
        monotone.push(rep);
    }
    let pass = actions.iter().all(|r| r.pass) && monotone.iter().all(|r| r.pass);
    Ok(Output::new(json!({"pass": pass, "action_signs": actions, "monotone": monotone}))?.with_table(t).with_pass(pass))
}

#[derive(Debug, Clone, Args)]
pub struct BetaArgs {
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Norm of the Reeb field
    #[arg(long, default_value_t = 1.0)]
    pub reeb_norm: f64,
    /// Rows in the sample table
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Points of the r-grid for the envelope check
    #[arg(long, default_value_t = 10_000)]
    pub grid: usize,
    /// Slopes of a homotopy through beta to check for monotonicity (needs --a-plus too)
    #[arg(long, requires = "a_plus")]
    pub a_minus: Option<f64>,
    #[arg(long, requires = "a_minus")]
    pub a_plus: Option<f64>,
}

pub fn beta_build(args: &BetaArgs) -> CliResult<Output> {
    let params = BetaParams { eps: args.eps, delta: args.delta, rho: args.rho, reeb_norm: args.reeb_norm };
    let beta = build_beta(params, args.samples)?;
    let envelope = beta.check_envelope();
    let grid = beta.check_envelope_grid(args.grid);
    let homotopy = args.a_minus.zip(args.a_plus).map(|(m, p)| monotone_homotopy_check(m, p, &beta));
    let pass = envelope.pass && grid.pass && homotopy.as_ref().is_none_or(|h| h.pass);
    let mut t = Table::new(&["r", "u", "beta", "dbeta_du"]);
    for &(r, u, b, d) in &beta.samples {
        t.push(vec![num(r), num(u), num(b), num(d)]);
    }
    let body = json!({"pass": pass, "k": params.k(), "beta": beta, "envelope": envelope, "grid_envelope": grid, "homotopy": homotopy});
    Ok(Output::new(body)?.with_table(t).with_pass(pass))
}
